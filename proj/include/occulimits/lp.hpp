#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace occulimits {

/// One nonzero of a constraint column.
struct ColumnEntry {
    std::size_t row = 0;
    double value = 0.0;
};

/**
 * minimize c^T x  subject to  A x = b,  x >= 0.
 *
 * Columns are stored compressed; the occupation-measure programs have two or
 * three nonzeros per column, which keeps Example-scale programs with 10^5
 * variables in memory. from_dense() accepts an ordinary row-major matrix.
 */
class LinearProgram {
  public:
    explicit LinearProgram(std::size_t num_rows = 0) : b_(num_rows, 0.0), row_names_(num_rows) {}

    static LinearProgram from_dense(std::span<const double> c, const std::vector<std::vector<double>>& a,
                                    std::span<const double> b);

    /// Appends a variable; entries with equal rows are summed. Returns its index.
    std::size_t add_variable(double cost, std::vector<ColumnEntry> column, std::string name = {});

    void set_rhs(std::size_t row, double value) { b_.at(row) = value; }
    void set_row_name(std::size_t row, std::string name) { row_names_.at(row) = std::move(name); }

    std::size_t num_rows() const noexcept { return b_.size(); }
    std::size_t num_cols() const noexcept { return c_.size(); }
    std::span<const double> c() const noexcept { return c_; }
    std::span<const double> b() const noexcept { return b_; }
    std::span<const ColumnEntry> column(std::size_t j) const {
        return {entries_.data() + col_start_[j], col_start_[j + 1] - col_start_[j]};
    }
    const std::string& col_name(std::size_t j) const { return col_names_[j]; }
    const std::string& row_name(std::size_t i) const { return row_names_[i]; }

    /// A x
    std::vector<double> multiply(std::span<const double> x) const;
    /// A^T y
    std::vector<double> multiply_transpose(std::span<const double> y) const;

  private:
    std::vector<double> c_;
    std::vector<double> b_;
    std::vector<std::size_t> col_start_{0};
    std::vector<ColumnEntry> entries_;
    std::vector<std::string> col_names_;
    std::vector<std::string> row_names_;
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus status) noexcept;

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    /// One multiplier per constraint. For infeasible programs this is a Farkas
    /// certificate: A^T y <= 0 and b^T y > 0.
    std::vector<double> y_dual;
    double objective = 0.0;
    std::size_t iterations = 0;
};

struct SimplexOptions {
    double pivot_tol = 1e-9;
    double optimality_tol = 1e-11;
    double infeasibility_tol = 1e-8;
    /// Consecutive degenerate pivots before switching to the least-index
    /// rule; 0 picks max(50, 2 rows).
    std::size_t degenerate_streak = 0;
    /// Pivots between refactorizations; 0 picks max(100, rows).
    std::size_t refactor_interval = 0;
    /// Columns priced per partial-pricing window; 0 picks max(1000, cols / 8).
    std::size_t pricing_window = 0;
    /// 0 picks a limit proportional to the problem size.
    std::size_t max_iterations = 0;
};

/// Two-phase revised simplex. Deterministic: identical input gives
/// bit-identical output. Throws std::runtime_error on iteration limit.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

/// Optimality diagnostics of a solution against its program.
struct LpCheck {
    double primal_residual = 0.0;  ///< ||Ax - b||_inf
    double min_x = 0.0;
    double duality_gap = 0.0;      ///< |c^T x - b^T y|
    double min_reduced_cost = 0.0; ///< min_j (c - A^T y)_j
    double complementarity = 0.0;  ///< max_j |x_j (c - A^T y)_j|
};

LpCheck check_solution(const LinearProgram& lp, const LpSolution& sol);

/// Plain-text dump of (c, A, b) for external cross-checking.
void dump_lp(const LinearProgram& lp, std::ostream& os);

}  // namespace occulimits
