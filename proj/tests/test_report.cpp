#include "occulimits/report.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

using namespace occulimits;

TEST_CASE("numbers carry twelve significant digits") {
    CHECK(format_number(0.1 + 0.2) == "0.3");
    CHECK(format_number(-0.25) == "-0.25");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(round12(2.0 / 3.0) == 0.666666666667);
}

TEST_CASE("bounds CSV rows") {
    BoundsReport rep;
    rep.k_star_y0 = -0.25;
    rep.d_star_y0 = -0.25;
    rep.vT_curve = {{10.0, -0.175, 0.1, true}};
    rep.heps_curve = {{0.1, -0.175, 0.1, true}, {0.01, 3.0, 0.01, false}};
    const auto csv = bounds_csv(rep);
    CHECK(csv == "kind,parameter,value,k_star_y0,d_star_y0,in_sandwich\n"
                 "vT,10,-0.175,-0.25,-0.25,true\n"
                 "heps,0.1,-0.175,-0.25,-0.25,true\n"
                 "heps,0.01,3,-0.25,-0.25,false\n");
}

TEST_CASE("bounds JSON") {
    const auto model = example1_model(0.5);
    BoundsReport rep;
    rep.y0 = 1;
    rep.k_star_y0 = -0.25;
    rep.vT_curve = {{1.0, 0.5, 2.0, true}};
    auto j = to_json(rep, model);
    CHECK(j["y0_coords"][0] == 0.5);
    CHECK(j["k_star_y0"] == -0.25);
    CHECK(j["limits_ok"].is_null());
    CHECK(j["vT_curve"][0]["in_sandwich"] == true);
    rep.limits_ok = true;
    CHECK(to_json(rep, model)["limits_ok"] == true);
}

TEST_CASE("measure, plan and verdict JSON") {
    const auto model = example1_model(0.5);
    GMeasure g;
    g.weights = {0.0, 0.75, 0.25, 0.0};
    const auto jg = to_json(g, model);
    REQUIRE(jg.size() == 2);
    CHECK(jg[0]["state"] == 0);
    CHECK(jg[0]["control"] == 1);
    CHECK(jg[1]["weight"] == 0.25);

    const auto jp = to_json(Plan::deterministic({1, 0}), model);
    CHECK(jp["kind"] == "deterministic");
    CHECK(jp["rows"][0]["value"][0] == 1.0);
    CHECK(jp["rows"][1]["value"][0] == -1.0);
    CHECK(to_json(Plan::staged({{0, 0}, {1, 1}}), model)["stages"].size() == 2);

    OptimalityVerdict v;
    v.certificate_ok = false;
    const auto jv = to_json(v);
    CHECK(jv["cost_residual"].is_null());
    CHECK(jv["certified"] == false);
}
