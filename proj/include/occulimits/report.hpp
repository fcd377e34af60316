#pragma once

#include "occulimits/analysis.hpp"
#include "occulimits/measures.hpp"
#include "occulimits/model.hpp"
#include "occulimits/plan.hpp"
#include "occulimits/programs.hpp"

#include <json.hpp>

#include <string>

namespace occulimits {

/// Decimal rendering with 12 significant digits.
std::string format_number(double x);

/// x rounded to 12 significant digits, for embedding in JSON.
double round12(double x);

nlohmann::json to_json(const GMeasure& g, const FiniteModel& model);
nlohmann::json to_json(const DualCertificate& dual, const FiniteModel& model);
nlohmann::json to_json(const ProgramResult& r, const FiniteModel& model);
nlohmann::json to_json(const Plan& plan, const FiniteModel& model);
nlohmann::json to_json(const BoundsReport& rep, const FiniteModel& model);
nlohmann::json to_json(const OptimalityVerdict& v);

/// One row per curve point: kind,parameter,value,k_star_y0,d_star_y0,in_sandwich.
std::string bounds_csv(const BoundsReport& rep);

}  // namespace occulimits
