#include "occulimits/lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

namespace occulimits {

LinearProgram LinearProgram::from_dense(std::span<const double> c, const std::vector<std::vector<double>>& a,
                                        std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("from_dense: A and b row counts differ");
    LinearProgram lp(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (a[i].size() != c.size()) throw std::invalid_argument("from_dense: row " + std::to_string(i) + " has wrong length");
        lp.set_rhs(i, b[i]);
    }
    for (std::size_t j = 0; j < c.size(); ++j) {
        std::vector<ColumnEntry> col;
        for (std::size_t i = 0; i < b.size(); ++i)
            if (a[i][j] != 0.0) col.push_back({i, a[i][j]});
        lp.add_variable(c[j], std::move(col));
    }
    return lp;
}

std::size_t LinearProgram::add_variable(double cost, std::vector<ColumnEntry> column, std::string name) {
    if (!std::isfinite(cost)) throw std::invalid_argument("add_variable: non-finite cost");
    std::sort(column.begin(), column.end(), [](const auto& l, const auto& r) { return l.row < r.row; });
    std::size_t start = entries_.size();
    for (const auto& e : column) {
        if (e.row >= num_rows()) throw std::out_of_range("add_variable: row index out of range");
        if (!std::isfinite(e.value)) throw std::invalid_argument("add_variable: non-finite coefficient");
        if (entries_.size() > start && entries_.back().row == e.row)
            entries_.back().value += e.value;
        else
            entries_.push_back(e);
    }
    // Drop exact cancellations.
    entries_.erase(std::remove_if(entries_.begin() + static_cast<std::ptrdiff_t>(start), entries_.end(),
                                  [](const ColumnEntry& e) { return e.value == 0.0; }),
                   entries_.end());
    c_.push_back(cost);
    col_start_.push_back(entries_.size());
    col_names_.push_back(std::move(name));
    return c_.size() - 1;
}

std::vector<double> LinearProgram::multiply(std::span<const double> x) const {
    std::vector<double> out(num_rows(), 0.0);
    for (std::size_t j = 0; j < num_cols(); ++j)
        for (const auto& e : column(j)) out[e.row] += e.value * x[j];
    return out;
}

std::vector<double> LinearProgram::multiply_transpose(std::span<const double> y) const {
    std::vector<double> out(num_cols(), 0.0);
    for (std::size_t j = 0; j < num_cols(); ++j) {
        double acc = 0.0;
        for (const auto& e : column(j)) acc += e.value * y[e.row];
        out[j] = acc;
    }
    return out;
}

const char* to_string(LpStatus status) noexcept {
    switch (status) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

/// Revised simplex state over the row-scaled program. Variables
/// [0, n) are structural, [n, n+m) are artificial unit columns.
class RevisedSimplex {
  public:
    RevisedSimplex(const LinearProgram& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
        m_ = lp.num_rows();
        n_ = lp.num_cols();
        scale_.assign(m_, 1.0);
        std::vector<double> row_max(m_, 0.0);
        for (std::size_t j = 0; j < n_; ++j)
            for (const auto& e : lp.column(j)) row_max[e.row] = std::max(row_max[e.row], std::abs(e.value));
        b_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            if (row_max[i] > 0.0) scale_[i] = 1.0 / row_max[i];
            if (lp.b()[i] < 0.0) scale_[i] = -scale_[i];
            b_[i] = lp.b()[i] * scale_[i];
        }
        basis_.resize(m_);
        position_.assign(n_ + m_, kNonbasic);
        for (std::size_t k = 0; k < m_; ++k) {
            basis_[k] = n_ + k;
            position_[n_ + k] = k;
        }
        binv_.assign(m_ * m_, 0.0);
        for (std::size_t k = 0; k < m_; ++k) binv_[k * m_ + k] = 1.0;
        xb_ = b_;
        max_iter_ = opt.max_iterations ? opt.max_iterations : 50 * (m_ + n_) + 10000;
        refactor_every_ = opt.refactor_interval ? opt.refactor_interval : std::max<std::size_t>(100, m_);
        streak_limit_ = opt.degenerate_streak ? opt.degenerate_streak : std::max<std::size_t>(50, 2 * m_);
        window_ = opt.pricing_window ? opt.pricing_window : std::max<std::size_t>(1000, n_ / 8);
        ys_.assign(m_, 0.0);
    }

    LpSolution run() {
        LpSolution sol;
        // Phase 1: minimize the sum of artificials.
        phase_ = 1;
        iterate();
        double infeas = 0.0;
        for (std::size_t k = 0; k < m_; ++k)
            if (basis_[k] >= n_) infeas += std::max(0.0, xb_[k]);
        if (infeas > opt_.infeasibility_tol) {
            sol.status = LpStatus::infeasible;
            sol.y_dual = unscaled_duals();
            sol.x.assign(n_, 0.0);
            sol.iterations = iterations_;
            return sol;
        }
        phase_ = 2;
        compute_duals();
        if (!iterate()) {
            sol.status = LpStatus::unbounded;
            sol.x.assign(n_, 0.0);
            sol.iterations = iterations_;
            return sol;
        }
        refactor();
        compute_duals();
        sol.status = LpStatus::optimal;
        sol.x.assign(n_, 0.0);
        for (std::size_t k = 0; k < m_; ++k)
            if (basis_[k] < n_) {
                const double v = xb_[k];
                sol.x[basis_[k]] = (v < 0.0 && v > -1e-11) ? 0.0 : v;
            }
        sol.y_dual = unscaled_duals();
        double obj = 0.0;
        for (std::size_t j = 0; j < n_; ++j) obj += lp_.c()[j] * sol.x[j];
        sol.objective = obj;
        sol.iterations = iterations_;
        return sol;
    }

  private:
    static constexpr std::size_t kNonbasic = std::numeric_limits<std::size_t>::max();
    static constexpr double kHarrisTol = 1e-9;

    double cost(std::size_t j) const {
        if (phase_ == 1) return j >= n_ ? 1.0 : 0.0;
        return j < n_ ? lp_.c()[j] : 0.0;
    }

    void compute_duals() {
        y_.assign(m_, 0.0);
        for (std::size_t k = 0; k < m_; ++k) {
            const double cb = cost(basis_[k]);
            if (cb == 0.0) continue;
            const double* row = &binv_[k * m_];
            for (std::size_t i = 0; i < m_; ++i) y_[i] += cb * row[i];
        }
    }

    std::vector<double> unscaled_duals() const {
        std::vector<double> y(m_);
        for (std::size_t i = 0; i < m_; ++i) y[i] = y_[i] * scale_[i];
        return y;
    }

    /// Requires ys_ to hold the scaled duals.
    double reduced_cost(std::size_t j) const {
        double d = cost(j);
        for (const auto& e : lp_.column(j)) d -= e.value * ys_[e.row];
        return d;
    }

    void refactor() {
        Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
        for (std::size_t k = 0; k < m_; ++k) {
            const std::size_t j = basis_[k];
            if (j >= n_) {
                basis_matrix(static_cast<Eigen::Index>(j - n_), static_cast<Eigen::Index>(k)) = 1.0;
            } else {
                for (const auto& e : lp_.column(j))
                    basis_matrix(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(k)) = e.value * scale_[e.row];
            }
        }
        Eigen::MatrixXd inv = basis_matrix.partialPivLu().inverse();
        for (std::size_t k = 0; k < m_; ++k)
            for (std::size_t i = 0; i < m_; ++i)
                binv_[k * m_ + i] = inv(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
        for (std::size_t k = 0; k < m_; ++k) {
            double acc = 0.0;
            const double* row = &binv_[k * m_];
            for (std::size_t i = 0; i < m_; ++i) acc += row[i] * b_[i];
            xb_[k] = acc;
        }
        since_refactor_ = 0;
    }

    /// Runs pivots until optimal (true) or unbounded (false).
    bool iterate() {
        compute_duals();
        std::size_t streak = 0;
        bool bland = false;
        std::vector<double> alpha(m_);
        while (true) {
            if (iterations_++ > max_iter_) throw std::runtime_error("simplex iteration limit exceeded");

            // Pricing over structural columns; artificials never re-enter.
            // Dantzig's rule is applied to rotating windows of columns (partial
            // pricing); a full sweep without candidates proves optimality.
            for (std::size_t i = 0; i < m_; ++i) ys_[i] = scale_[i] * y_[i];
            std::size_t entering = kNonbasic;
            if (bland) {
                for (std::size_t j = 0; j < n_ && entering == kNonbasic; ++j)
                    if (position_[j] == kNonbasic && reduced_cost(j) < -opt_.optimality_tol) entering = j;
            } else {
                double best = -opt_.optimality_tol;
                std::size_t j = cursor_;
                for (std::size_t scanned = 0; scanned < n_ && entering == kNonbasic;) {
                    const std::size_t stop = std::min(n_, scanned + window_);
                    for (; scanned < stop; ++scanned, j = (j + 1 == n_ ? 0 : j + 1)) {
                        if (position_[j] != kNonbasic) continue;
                        const double d = reduced_cost(j);
                        if (d < best) {
                            best = d;
                            entering = j;
                        }
                    }
                }
                cursor_ = j;
            }
            if (entering == kNonbasic) {
                // Accept optimality only on duals from a fresh factorization.
                if (since_refactor_ == 0) return true;
                refactor();
                compute_duals();
                --iterations_;
                continue;
            }
            const double d_enter = reduced_cost(entering);

            std::fill(alpha.begin(), alpha.end(), 0.0);
            for (const auto& e : lp_.column(entering)) {
                const double a = e.value * scale_[e.row];
                for (std::size_t k = 0; k < m_; ++k) alpha[k] += binv_[k * m_ + e.row] * a;
            }

            // Ratio test. In phase 2 a basic artificial must stay at zero, so
            // any nonzero coefficient in its row blocks at ratio zero. Outside
            // the least-index regime this is a Harris two-pass test: the first
            // pass bounds the step with a small feasibility allowance, the
            // second picks the largest pivot among rows within that bound.
            auto coeff = [&](std::size_t k) {
                return (phase_ == 2 && basis_[k] >= n_) ? std::abs(alpha[k]) : alpha[k];
            };
            auto value = [&](std::size_t k) {
                return (phase_ == 2 && basis_[k] >= n_) ? 0.0 : std::max(0.0, xb_[k]);
            };
            std::size_t leave = kNonbasic;
            if (bland) {
                // Least basic index among the minimum-ratio rows, ignoring
                // pivots far smaller than the largest tied candidate.
                double best_ratio = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < m_; ++k) {
                    const double a = coeff(k);
                    if (a > opt_.pivot_tol) best_ratio = std::min(best_ratio, value(k) / a);
                }
                const double band = best_ratio + 1e-12 * (1.0 + best_ratio);
                double biggest = 0.0;
                for (std::size_t k = 0; k < m_; ++k) {
                    const double a = coeff(k);
                    if (a > opt_.pivot_tol && value(k) / a <= band) biggest = std::max(biggest, a);
                }
                for (std::size_t k = 0; k < m_; ++k) {
                    const double a = coeff(k);
                    if (a >= 1e-3 * biggest && a > opt_.pivot_tol && value(k) / a <= band &&
                        (leave == kNonbasic || basis_[k] < basis_[leave]))
                        leave = k;
                }
            } else {
                double bound = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < m_; ++k) {
                    const double a = coeff(k);
                    if (a > opt_.pivot_tol) bound = std::min(bound, (value(k) + kHarrisTol) / a);
                }
                double biggest = 0.0;
                for (std::size_t k = 0; k < m_; ++k) {
                    const double a = coeff(k);
                    if (a > opt_.pivot_tol && value(k) / a <= bound && a > biggest) {
                        biggest = a;
                        leave = k;
                    }
                }
            }
            if (leave == kNonbasic) {
                // A ray found on stale duals may be rounding noise; retry fresh.
                if (since_refactor_ == 0) return false;
                refactor();
                compute_duals();
                --iterations_;
                continue;
            }

            const double theta = (phase_ == 2 && basis_[leave] >= n_) ? 0.0 : std::max(0.0, xb_[leave]) / alpha[leave];
            if (theta <= 1e-12) {
                if (++streak >= streak_limit_) bland = true;
            } else {
                streak = 0;
                bland = false;
            }

            for (std::size_t k = 0; k < m_; ++k) xb_[k] -= theta * alpha[k];
            xb_[leave] = theta;

            // Dual update uses the pre-pivot row of the basis inverse.
            const double ar = alpha[leave];
            double* prow = &binv_[leave * m_];
            const double step = d_enter / ar;
            for (std::size_t i = 0; i < m_; ++i) y_[i] += step * prow[i];

            for (std::size_t i = 0; i < m_; ++i) prow[i] /= ar;
            for (std::size_t k = 0; k < m_; ++k) {
                if (k == leave || alpha[k] == 0.0) continue;
                const double f = alpha[k];
                double* row = &binv_[k * m_];
                for (std::size_t i = 0; i < m_; ++i) row[i] -= f * prow[i];
            }

            position_[basis_[leave]] = kNonbasic;
            basis_[leave] = entering;
            position_[entering] = leave;

            if (++since_refactor_ >= refactor_every_) {
                refactor();
                compute_duals();
            }
        }
    }

    const LinearProgram& lp_;
    const SimplexOptions& opt_;
    std::size_t m_ = 0, n_ = 0;
    int phase_ = 1;
    std::vector<double> scale_, b_, xb_, y_, ys_, binv_;
    std::vector<std::size_t> basis_, position_;
    std::size_t iterations_ = 0, since_refactor_ = 0, max_iter_ = 0, refactor_every_ = 100, streak_limit_ = 50, window_ = 0, cursor_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
    for (double v : lp.b())
        if (!std::isfinite(v)) throw std::invalid_argument("solve_lp: non-finite right-hand side");
    if (lp.num_rows() == 0) {
        LpSolution sol;
        sol.x.assign(lp.num_cols(), 0.0);
        for (double c : lp.c())
            if (c < 0.0) {
                sol.status = LpStatus::unbounded;
                return sol;
            }
        sol.status = LpStatus::optimal;
        return sol;
    }
    RevisedSimplex simplex(lp, options);
    return simplex.run();
}

LpCheck check_solution(const LinearProgram& lp, const LpSolution& sol) {
    LpCheck chk;
    const auto ax = lp.multiply(sol.x);
    for (std::size_t i = 0; i < lp.num_rows(); ++i)
        chk.primal_residual = std::max(chk.primal_residual, std::abs(ax[i] - lp.b()[i]));
    chk.min_x = sol.x.empty() ? 0.0 : *std::min_element(sol.x.begin(), sol.x.end());
    double cx = 0.0, by = 0.0;
    for (std::size_t j = 0; j < lp.num_cols(); ++j) cx += lp.c()[j] * sol.x[j];
    for (std::size_t i = 0; i < lp.num_rows(); ++i) by += lp.b()[i] * sol.y_dual[i];
    chk.duality_gap = std::abs(cx - by);
    const auto aty = lp.multiply_transpose(sol.y_dual);
    chk.min_reduced_cost = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lp.num_cols(); ++j) {
        const double d = lp.c()[j] - aty[j];
        chk.min_reduced_cost = std::min(chk.min_reduced_cost, d);
        chk.complementarity = std::max(chk.complementarity, std::abs(sol.x[j] * d));
    }
    if (lp.num_cols() == 0) chk.min_reduced_cost = 0.0;
    return chk;
}

void dump_lp(const LinearProgram& lp, std::ostream& os) {
    const auto old = os.precision(17);
    os << "rows " << lp.num_rows() << " cols " << lp.num_cols() << "\n";
    os << "c";
    for (double v : lp.c()) os << ' ' << v;
    os << "\nb";
    for (double v : lp.b()) os << ' ' << v;
    os << "\nA\n";
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        std::vector<double> row(lp.num_cols(), 0.0);
        for (std::size_t j = 0; j < lp.num_cols(); ++j)
            for (const auto& e : lp.column(j))
                if (e.row == i) row[j] = e.value;
        os << (lp.row_name(i).empty() ? "r" + std::to_string(i) : lp.row_name(i)) << ':';
        for (double v : row) os << ' ' << v;
        os << '\n';
    }
    os.precision(old);
}

}  // namespace occulimits
