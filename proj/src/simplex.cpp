#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <ostream>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "didpr/lp.hpp"

namespace didpr {

std::string to_string(LpStatus status) {
    switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

void LinearProgram::validate() const {
    if (!objective.empty() && objective.size() != num_vars)
        throw LpError("objective length does not match num_vars");
    for (double c : objective)
        if (!std::isfinite(c))
            throw LpError("non-finite objective coefficient");
    for (std::size_t j : start_hint)
        if (j >= num_vars)
            throw LpError("start hint references variable beyond num_vars");
    for (const auto* rows : {&eq, &ub})
        for (const auto& row : *rows) {
            if (row.index.size() != row.value.size())
                throw LpError("sparse row index/value length mismatch");
            if (!std::isfinite(row.rhs))
                throw LpError("non-finite right-hand side");
            for (std::size_t k = 0; k < row.index.size(); ++k) {
                if (row.index[k] >= num_vars)
                    throw LpError("constraint references variable beyond num_vars");
                if (!std::isfinite(row.value[k]))
                    throw LpError("non-finite constraint coefficient");
            }
        }
}

namespace {

enum class ColumnKind : unsigned char { Structural, Slack, Artificial };

// Standard form: rows scaled to unit max coefficient and sign-flipped so
// every right-hand side is nonnegative; columns stored compressed.
struct StandardForm {
    std::size_t m = 0;
    std::size_t n_struct = 0;
    std::vector<std::size_t> col_start{0};
    std::vector<std::size_t> row_index;
    std::vector<double> values;
    std::vector<ColumnKind> kind;
    std::vector<double> b;
    std::vector<std::size_t> initial_basis;

    std::size_t num_cols() const { return kind.size(); }

    void push_column(ColumnKind k) {
        kind.push_back(k);
        col_start.push_back(row_index.size());
    }
};

StandardForm to_standard_form(const LinearProgram& lp) {
    StandardForm sf;
    sf.m = lp.num_rows();
    sf.n_struct = lp.num_vars;
    sf.b.resize(sf.m);

    std::vector<double> row_scale(sf.m, 1.0);
    std::vector<std::vector<std::pair<std::size_t, double>>> cols(lp.num_vars);
    std::size_t r = 0;
    for (const auto* rows : {&lp.eq, &lp.ub})
        for (const auto& row : *rows) {
            double biggest = 0.0;
            for (double v : row.value)
                biggest = std::max(biggest, std::abs(v));
            double scale = biggest > 0.0 ? 1.0 / biggest : 1.0;
            if (row.rhs < 0.0)
                scale = -scale;
            row_scale[r] = scale;
            sf.b[r] = row.rhs * scale;
            for (std::size_t k = 0; k < row.index.size(); ++k)
                if (row.value[k] != 0.0)
                    cols[row.index[k]].emplace_back(r, row.value[k] * scale);
            ++r;
        }

    for (auto& col : cols) {
        // Duplicate indices within a row are summed.
        std::sort(col.begin(), col.end());
        for (std::size_t k = 0; k < col.size(); ++k) {
            if (!sf.row_index.empty() && sf.row_index.size() > sf.col_start.back() &&
                sf.row_index.back() == col[k].first) {
                sf.values.back() += col[k].second;
                continue;
            }
            sf.row_index.push_back(col[k].first);
            sf.values.push_back(col[k].second);
        }
        sf.push_column(ColumnKind::Structural);
    }

    sf.initial_basis.assign(sf.m, 0);
    std::vector<bool> covered(sf.m, false);
    for (std::size_t i = 0; i < lp.ub.size(); ++i) {
        const std::size_t row = lp.eq.size() + i;
        const double sign = row_scale[row] > 0.0 ? 1.0 : -1.0;
        // Slack columns are free to rescale, so they stay unit vectors.
        sf.row_index.push_back(row);
        sf.values.push_back(sign);
        sf.push_column(ColumnKind::Slack);
        if (sign > 0.0) {
            sf.initial_basis[row] = sf.num_cols() - 1;
            covered[row] = true;
        }
    }
    for (std::size_t row = 0; row < sf.m; ++row) {
        if (covered[row])
            continue;
        sf.row_index.push_back(row);
        sf.values.push_back(1.0);
        sf.push_column(ColumnKind::Artificial);
        sf.initial_basis[row] = sf.num_cols() - 1;
    }
    return sf;
}

class RevisedSimplex {
public:
    RevisedSimplex(StandardForm& sf, const LpOptions& options, std::size_t max_iterations)
        : sf_(sf), opt_(options), max_iterations_(max_iterations), m_(sf.m),
          basis_(sf.initial_basis), is_basic_(sf.num_cols(), false), binv_(m_ * m_, 0.0),
          xb_(sf.b), y_(m_, 0.0), alpha_(m_, 0.0) {
        for (std::size_t i = 0; i < m_; ++i) {
            binv_[i * m_ + i] = 1.0;
            is_basic_[basis_[i]] = true;
        }
    }

    enum class PhaseResult { Optimal, Unbounded };

    PhaseResult run(const std::vector<double>& cost, bool phase_two) {
        std::size_t degenerate_run = 0;
        bool bland = false;
        compute_duals(cost);
        for (;;) {
            if (iterations_ >= max_iterations_)
                throw LpError("simplex iteration cap exceeded (cycling/stall)");
            if (since_refactor_ >= opt_.refactor_every) {
                refactor();
                compute_duals(cost);
            }

            const auto entering = bland ? price_bland(cost) : price_partial(cost);
            if (!entering)
                return PhaseResult::Optimal;
            const auto [q, d_q] = *entering;
            compute_column(q);
            const auto leaving = ratio_test(phase_two, bland);
            if (!leaving)
                return PhaseResult::Unbounded;
            const double step = leaving->second;
            pivot(q, leaving->first, step);
            // y' = y + d_q * (row r of the updated inverse)
            const double* row = &binv_[leaving->first * m_];
            for (std::size_t j = 0; j < m_; ++j)
                y_[j] += d_q * row[j];
            ++iterations_;
            ++since_refactor_;
            if (step <= 1e-12) {
                if (++degenerate_run >= opt_.bland_after_degenerate)
                    bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

    double basic_cost(const std::vector<double>& cost) const {
        double s = 0.0;
        for (std::size_t i = 0; i < m_; ++i)
            s += cost[basis_[i]] * xb_[i];
        return s;
    }

    std::vector<double> structural_solution() const {
        std::vector<double> x(sf_.n_struct, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < sf_.n_struct)
                x[basis_[i]] = xb_[i];
        return x;
    }

    std::size_t iterations() const { return iterations_; }

    // Pivot hinted columns into rows held by artificials, ignoring primal
    // feasibility, then keep the basis only if no structural or slack ends up
    // negative. Rows whose artificial turns negative are sign-flipped.
    bool crash(std::span<const std::size_t> hint) {
        for (std::size_t q : hint) {
            if (q >= sf_.n_struct || is_basic_[q])
                continue;
            compute_column(q);
            std::optional<std::size_t> row;
            double biggest = 1e-3;
            for (std::size_t i = 0; i < m_; ++i)
                if (sf_.kind[basis_[i]] == ColumnKind::Artificial && std::abs(alpha_[i]) > biggest) {
                    biggest = std::abs(alpha_[i]);
                    row = i;
                }
            if (row)
                pivot(q, *row, 0.0);
        }
        refactor();
        for (std::size_t i = 0; i < m_; ++i)
            if (sf_.kind[basis_[i]] != ColumnKind::Artificial && xb_[i] < -opt_.feasibility_tol) {
                reset();
                return false;
            }
        bool flipped = false;
        for (std::size_t i = 0; i < m_; ++i)
            if (sf_.kind[basis_[i]] == ColumnKind::Artificial && xb_[i] < 0.0) {
                flip_row(sf_.row_index[sf_.col_start[basis_[i]]], basis_[i]);
                flipped = true;
            }
        if (flipped)
            refactor();
        for (auto& v : xb_)
            v = std::max(v, 0.0);
        return true;
    }

    void refactor() {
        since_refactor_ = 0;
        if (m_ == 0)
            return;
        // Basis columns are very sparse, so a sparse LU followed by m
        // triangular solves is far cheaper than a dense factorization.
        std::vector<Eigen::Triplet<double>> triplets;
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t j = basis_[i];
            for (std::size_t k = sf_.col_start[j]; k < sf_.col_start[j + 1]; ++k)
                triplets.emplace_back(static_cast<int>(sf_.row_index[k]), static_cast<int>(i), sf_.values[k]);
        }
        const auto dim = static_cast<Eigen::Index>(m_);
        Eigen::SparseMatrix<double> basis_matrix(dim, dim);
        basis_matrix.setFromTriplets(triplets.begin(), triplets.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(basis_matrix);
        if (lu.info() != Eigen::Success)
            throw LpError("basis factorization failed (singular basis)");
        const Eigen::MatrixXd inverse = lu.solve(Eigen::MatrixXd::Identity(dim, dim));
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t j = 0; j < m_; ++j)
                binv_[i * m_ + j] = inverse(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        for (std::size_t i = 0; i < m_; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < m_; ++j)
                v += binv_[i * m_ + j] * sf_.b[j];
            xb_[i] = v;
        }
    }

private:
    void reset() {
        basis_ = sf_.initial_basis;
        std::fill(is_basic_.begin(), is_basic_.end(), false);
        std::fill(binv_.begin(), binv_.end(), 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            binv_[i * m_ + i] = 1.0;
            is_basic_[basis_[i]] = true;
        }
        xb_ = sf_.b;
        since_refactor_ = 0;
    }

    // Negate a row of the standard form, leaving its artificial at +1.
    void flip_row(std::size_t row, std::size_t artificial) {
        for (std::size_t k = 0; k < sf_.row_index.size(); ++k)
            if (sf_.row_index[k] == row)
                sf_.values[k] = -sf_.values[k];
        sf_.values[sf_.col_start[artificial]] = 1.0;
        sf_.b[row] = -sf_.b[row];
    }

    void compute_duals(const std::vector<double>& cost) {
        std::fill(y_.begin(), y_.end(), 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const double c = cost[basis_[i]];
            if (c == 0.0)
                continue;
            const double* row = &binv_[i * m_];
            for (std::size_t j = 0; j < m_; ++j)
                y_[j] += c * row[j];
        }
    }

    double reduced_cost(const std::vector<double>& cost, std::size_t j) const {
        double d = cost[j];
        for (std::size_t k = sf_.col_start[j]; k < sf_.col_start[j + 1]; ++k)
            d -= y_[sf_.row_index[k]] * sf_.values[k];
        return d;
    }

    bool can_enter(std::size_t j) const {
        // Artificials never re-enter once they have left the basis.
        return !is_basic_[j] && sf_.kind[j] != ColumnKind::Artificial;
    }

    // Smallest-index improving column.
    std::optional<std::pair<std::size_t, double>> price_bland(const std::vector<double>& cost) const {
        for (std::size_t j = 0; j < sf_.num_cols(); ++j) {
            if (!can_enter(j))
                continue;
            const double d = reduced_cost(cost, j);
            if (d < -opt_.optimality_tol)
                return std::make_pair(j, d);
        }
        return std::nullopt;
    }

    // Dantzig rule over rotating column segments: the most negative reduced
    // cost in the first segment that has one. Optimality needs a full sweep.
    std::optional<std::pair<std::size_t, double>> price_partial(const std::vector<double>& cost) {
        const std::size_t n = sf_.num_cols();
        if (n == 0)
            return std::nullopt;
        const std::size_t segment = std::max<std::size_t>(2048, n / 8);
        std::size_t scanned = 0;
        while (scanned < n) {
            const std::size_t len = std::min(segment, n - scanned);
            std::optional<std::pair<std::size_t, double>> best;
            double best_d = -opt_.optimality_tol;
            for (std::size_t k = 0; k < len; ++k) {
                const std::size_t j = (price_cursor_ + k) % n;
                if (!can_enter(j))
                    continue;
                const double d = reduced_cost(cost, j);
                if (d < best_d) {
                    best_d = d;
                    best = std::make_pair(j, d);
                }
            }
            price_cursor_ = (price_cursor_ + len) % n;
            scanned += len;
            if (best)
                return best;
        }
        return std::nullopt;
    }

    void compute_column(std::size_t q) {
        std::fill(alpha_.begin(), alpha_.end(), 0.0);
        for (std::size_t k = sf_.col_start[q]; k < sf_.col_start[q + 1]; ++k) {
            const std::size_t r = sf_.row_index[k];
            const double v = sf_.values[k];
            for (std::size_t i = 0; i < m_; ++i)
                alpha_[i] += binv_[i * m_ + r] * v;
        }
    }

    // In phase two a basic artificial sits at level zero and must stay there,
    // so any nonzero entry in its row blocks the step at length zero.
    bool pinned_artificial(std::size_t i, bool phase_two) const {
        return phase_two && sf_.kind[basis_[i]] == ColumnKind::Artificial &&
               std::abs(alpha_[i]) > opt_.pivot_tol;
    }

    // Returns the leaving row and the step length.
    std::optional<std::pair<std::size_t, double>> ratio_test(bool phase_two, bool bland) const {
        const double tol = opt_.pivot_tol;
        if (bland) {
            std::optional<std::size_t> best;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                double ratio;
                if (pinned_artificial(i, phase_two))
                    ratio = 0.0;
                else if (alpha_[i] > tol)
                    ratio = std::max(xb_[i], 0.0) / alpha_[i];
                else
                    continue;
                if (ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[*best])) {
                    best_ratio = ratio;
                    best = i;
                }
            }
            if (!best)
                return std::nullopt;
            return std::make_pair(*best, best_ratio);
        }

        // Harris two-pass: bound the step with a relaxed ratio, then pick the
        // largest pivot among rows within that bound.
        double bound = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m_; ++i) {
            if (pinned_artificial(i, phase_two))
                bound = 0.0;
            else if (alpha_[i] > tol)
                bound = std::min(bound, (std::max(xb_[i], 0.0) + opt_.feasibility_tol) / alpha_[i]);
        }
        if (!std::isfinite(bound))
            return std::nullopt;
        std::optional<std::pair<std::size_t, double>> best;
        double best_pivot = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            double ratio;
            if (pinned_artificial(i, phase_two))
                ratio = 0.0;
            else if (alpha_[i] > tol)
                ratio = std::max(xb_[i], 0.0) / alpha_[i];
            else
                continue;
            if (ratio <= bound && std::abs(alpha_[i]) > best_pivot) {
                best_pivot = std::abs(alpha_[i]);
                best = std::make_pair(i, ratio);
            }
        }
        return best;
    }

    void pivot(std::size_t q, std::size_t r, double step) {
        const double a_r = alpha_[r];
        for (std::size_t i = 0; i < m_; ++i)
            if (i != r)
                xb_[i] -= step * alpha_[i];
        xb_[r] = step;

        double* pivot_row = &binv_[r * m_];
        const double inv = 1.0 / a_r;
        for (std::size_t j = 0; j < m_; ++j)
            pivot_row[j] *= inv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || alpha_[i] == 0.0)
                continue;
            const double f = alpha_[i];
            double* row = &binv_[i * m_];
            for (std::size_t j = 0; j < m_; ++j)
                row[j] -= f * pivot_row[j];
        }
        is_basic_[basis_[r]] = false;
        basis_[r] = q;
        is_basic_[q] = true;
    }

    StandardForm& sf_;
    const LpOptions& opt_;
    std::size_t max_iterations_;
    std::size_t m_;
    std::vector<std::size_t> basis_;
    std::vector<bool> is_basic_;
    std::vector<double> binv_;  // row-major m x m
    std::vector<double> xb_;
    std::vector<double> y_;
    std::vector<double> alpha_;
    std::size_t iterations_ = 0;
    std::size_t since_refactor_ = 0;
    std::size_t price_cursor_ = 0;
};

}  // namespace

LpSolution SimplexSolver::solve(const LinearProgram& lp) const {
    lp.validate();
    StandardForm sf = to_standard_form(lp);
    const std::size_t cap = options_.max_iterations != 0
                                ? options_.max_iterations
                                : 50 * (lp.num_vars + lp.num_rows()) + 50;
    RevisedSimplex simplex(sf, options_, cap);
    LpSolution solution;
    if (!lp.start_hint.empty())
        simplex.crash(lp.start_hint);

    bool has_artificial = false;
    std::vector<double> phase1_cost(sf.num_cols(), 0.0);
    for (std::size_t j = 0; j < sf.num_cols(); ++j)
        if (sf.kind[j] == ColumnKind::Artificial) {
            phase1_cost[j] = 1.0;
            has_artificial = true;
        }
    if (has_artificial) {
        simplex.run(phase1_cost, false);
        simplex.refactor();
        if (simplex.basic_cost(phase1_cost) > options_.feasibility_tol) {
            solution.status = LpStatus::Infeasible;
            solution.iterations = simplex.iterations();
            return solution;
        }
    }

    std::vector<double> phase2_cost(sf.num_cols(), 0.0);
    const bool has_objective = !lp.objective.empty();
    if (has_objective)
        std::copy(lp.objective.begin(), lp.objective.end(), phase2_cost.begin());
    if (has_objective &&
        simplex.run(phase2_cost, true) == RevisedSimplex::PhaseResult::Unbounded) {
        solution.status = LpStatus::Unbounded;
        solution.iterations = simplex.iterations();
        return solution;
    }

    simplex.refactor();
    solution.status = LpStatus::Optimal;
    solution.x = simplex.structural_solution();
    for (auto& v : solution.x)
        if (v < 0.0 && v > -options_.feasibility_tol)
            v = 0.0;
    if (has_objective)
        for (std::size_t j = 0; j < lp.num_vars; ++j)
            solution.objective_value += lp.objective[j] * solution.x[j];
    solution.iterations = simplex.iterations();
    return solution;
}

LpSolution solve(const LinearProgram& lp, const LpOptions& options) {
    return SimplexSolver(options).solve(lp);
}

LpSolution solve_feasibility(const LinearProgram& lp, const LpOptions& options) {
    LinearProgram stripped = lp;
    stripped.objective.clear();
    return SimplexSolver(options).solve(stripped);
}

LpResiduals residuals(const LinearProgram& lp, std::span<const double> x) {
    LpResiduals res;
    res.min_x = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
    auto activity = [&](const SparseRow& row) {
        double s = 0.0;
        for (std::size_t k = 0; k < row.index.size(); ++k)
            s += row.value[k] * x[row.index[k]];
        return s;
    };
    for (const auto& row : lp.eq)
        res.max_eq = std::max(res.max_eq, std::abs(activity(row) - row.rhs));
    for (const auto& row : lp.ub)
        res.max_ub = std::max(res.max_ub, activity(row) - row.rhs);
    return res;
}

void dump_lp(const LinearProgram& lp, std::ostream& out) {
    auto terms = [&](const SparseRow& row) {
        for (std::size_t k = 0; k < row.index.size(); ++k)
            out << ' ' << row.value[k] << "*x" << row.index[k];
    };
    out.precision(17);
    out << "vars " << lp.num_vars << '\n';
    out << "min";
    for (std::size_t j = 0; j < lp.objective.size(); ++j)
        if (lp.objective[j] != 0.0)
            out << ' ' << lp.objective[j] << "*x" << j;
    out << '\n';
    for (const auto& row : lp.eq) {
        out << "eq";
        terms(row);
        out << " = " << row.rhs << '\n';
    }
    for (const auto& row : lp.ub) {
        out << "ub";
        terms(row);
        out << " <= " << row.rhs << '\n';
    }
}

}  // namespace didpr
