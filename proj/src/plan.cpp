#include "occulimits/plan.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace occulimits {

Plan Plan::deterministic(std::vector<std::size_t> selector) {
    Plan p;
    p.kind_ = Kind::stationary_deterministic;
    p.selector_ = std::move(selector);
    return p;
}

Plan Plan::randomized(std::vector<std::vector<double>> kernel) {
    for (std::size_t y = 0; y < kernel.size(); ++y) {
        double s = 0.0;
        for (double q : kernel[y]) {
            if (!(q >= 0.0)) throw std::invalid_argument("randomized plan has a negative probability at state " + std::to_string(y));
            s += q;
        }
        if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("randomized plan row " + std::to_string(y) + " does not sum to 1");
    }
    Plan p;
    p.kind_ = Kind::stationary_randomized;
    p.kernel_ = std::move(kernel);
    return p;
}

Plan Plan::staged(std::vector<std::vector<std::size_t>> stages) {
    Plan p;
    p.kind_ = Kind::staged;
    p.stages_ = std::move(stages);
    return p;
}

std::size_t Plan::horizon() const noexcept {
    return kind_ == Kind::staged ? stages_.size() : std::numeric_limits<std::size_t>::max();
}

void Plan::check(const FiniteModel& model) const {
    const std::size_t n = model.num_states();
    auto check_selector = [&](const std::vector<std::size_t>& sel, const char* what) {
        if (sel.size() != n) throw std::invalid_argument(std::string(what) + " has " + std::to_string(sel.size()) + " entries, model has " + std::to_string(n) + " states");
        for (std::size_t y = 0; y < n; ++y)
            if (sel[y] >= model.num_controls(y))
                throw std::invalid_argument(std::string(what) + " selects inadmissible control " + std::to_string(sel[y]) + " at state " + std::to_string(y));
    };
    switch (kind_) {
        case Kind::stationary_deterministic:
            check_selector(selector_, "plan");
            break;
        case Kind::stationary_randomized:
            if (kernel_.size() != n) throw std::invalid_argument("randomized plan size does not match the model");
            for (std::size_t y = 0; y < n; ++y)
                if (kernel_[y].size() != model.num_controls(y))
                    throw std::invalid_argument("randomized plan row " + std::to_string(y) + " has wrong length");
            break;
        case Kind::staged:
            for (const auto& s : stages_) check_selector(s, "plan stage");
            break;
    }
}

std::vector<double> Plan::pair_weights(const FiniteModel& model, std::size_t t) const {
    std::vector<double> w(model.num_pairs(), 0.0);
    switch (kind_) {
        case Kind::stationary_deterministic:
            for (std::size_t y = 0; y < model.num_states(); ++y) w[model.pair_index(y, selector_.at(y))] = 1.0;
            break;
        case Kind::stationary_randomized:
            for (std::size_t y = 0; y < model.num_states(); ++y)
                for (std::size_t u = 0; u < model.num_controls(y); ++u) w[model.pair_index(y, u)] = kernel_[y][u];
            break;
        case Kind::staged:
            if (t >= stages_.size())
                throw std::invalid_argument("stage " + std::to_string(t) + " is beyond the plan horizon " + std::to_string(stages_.size()));
            for (std::size_t y = 0; y < model.num_states(); ++y) w[model.pair_index(y, stages_[t].at(y))] = 1.0;
            break;
    }
    return w;
}

}  // namespace occulimits
