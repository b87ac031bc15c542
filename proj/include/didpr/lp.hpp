#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "didpr/error.hpp"

namespace didpr {

/// One constraint row a.x (= or <=) rhs in sparse form.
struct SparseRow {
    std::vector<std::size_t> index;
    std::vector<double> value;
    double rhs = 0.0;

    void add(std::size_t i, double v) {
        index.push_back(i);
        value.push_back(v);
    }
};

/// minimize c.x  subject to  eq rows, ub rows, x >= 0.
/// An empty objective means a pure feasibility problem.
struct LinearProgram {
    std::size_t num_vars = 0;
    std::vector<double> objective;
    std::vector<SparseRow> eq;
    std::vector<SparseRow> ub;
    /// Optional structural columns to try as the starting basis. The solver
    /// keeps the crash only when the resulting basic solution is nonnegative.
    std::vector<std::size_t> start_hint;

    std::size_t num_rows() const noexcept { return eq.size() + ub.size(); }
    /// Throws LpError on out-of-range indices, size mismatches or non-finite data.
    void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective_value = 0.0;
    std::size_t iterations = 0;
};

struct LpOptions {
    double feasibility_tol = 1e-8;  // phase-1 optimum above this means infeasible
    double optimality_tol = 1e-9;   // reduced-cost threshold
    double pivot_tol = 1e-9;
    std::size_t max_iterations = 0;  // 0: 50 * (num_vars + num_rows)
    std::size_t bland_after_degenerate = 1000;
    std::size_t refactor_every = 100;
};

class LpError : public Error {
public:
    using Error::Error;
};

/// Solver contract, so an external backend can replace the embedded simplex.
class LpBackend {
public:
    virtual ~LpBackend() = default;
    virtual LpSolution solve(const LinearProgram& lp) const = 0;
};

/// Two-phase revised primal simplex with a dense basis inverse. Dantzig
/// pricing with a Harris ratio test; switches to Bland's rule after a run of
/// degenerate pivots and back once progress resumes.
class SimplexSolver final : public LpBackend {
public:
    explicit SimplexSolver(LpOptions options = {}) : options_(options) {}
    LpSolution solve(const LinearProgram& lp) const override;

private:
    LpOptions options_;
};

LpSolution solve(const LinearProgram& lp, const LpOptions& options = {});

/// Solve ignoring any objective; any feasible point is acceptable.
LpSolution solve_feasibility(const LinearProgram& lp, const LpOptions& options = {});

struct LpResiduals {
    double max_eq = 0.0;  // max |a.x - b| over equality rows
    double max_ub = 0.0;  // max (a.x - b)+ over inequality rows
    double min_x = 0.0;   // smallest coordinate
};

/// Independent residual pass over the original (unscaled) constraints.
LpResiduals residuals(const LinearProgram& lp, std::span<const double> x);

/// Plain-text dump, one constraint per line, for external cross-checks.
void dump_lp(const LinearProgram& lp, std::ostream& out);

}  // namespace didpr
