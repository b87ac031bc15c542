#include "didpr/eta_solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <ostream>

#include "didpr/error.hpp"

namespace didpr {

namespace {

// Coefficients beyond [-1, 1] by at most this much are rounding noise.
constexpr double kBoundClampSlack = 1e-6;
constexpr double kReconstructionTol = 1e-4;
constexpr double kMarginalTol = 1e-7;

void require_defined(TypePair t, const EndDistributions& ends) {
    if (!(ends.sigma_product(t) > 0.0))
        throw Error("degenerate end distribution; " + t.label() + " target is meaningless");
}

}  // namespace

EtaProblem EtaProblem::from_nu(DegreePairDist nu) {
    EtaProblem p;
    p.nu = std::move(nu);
    std::tie(p.source_pairs, p.source_mass) = source_masses(p.nu);
    std::tie(p.target_pairs, p.target_mass) = target_masses(p.nu);
    p.ends = end_distributions(p.source_pairs, p.source_mass, p.target_pairs, p.target_mass);
    return p;
}

EtaProblem EtaProblem::from_graph(const DirectedGraph& g) {
    return from_nu(degree_pair_dist(g));
}

double g_map(TypePair t, double r, const EndDistributions& ends) {
    require_defined(t, ends);
    return ends.sigma_product(t) * r + ends.independent_moment(t);
}

double g_inverse(TypePair t, double moment, const EndDistributions& ends) {
    require_defined(t, ends);
    return (moment - ends.independent_moment(t)) / ends.sigma_product(t);
}

std::vector<double> moment_coefficients(const EtaProblem& p, TypePair t) {
    std::vector<double> coef(p.num_vars());
    for (std::size_t r = 0; r < p.rows(); ++r) {
        const double x = degree_of_type(p.source_pairs[r], t.source_type);
        for (std::size_t c = 0; c < p.cols(); ++c)
            coef[r * p.cols() + c] = x * degree_of_type(p.target_pairs[c], t.target_type);
    }
    return coef;
}

namespace {

SparseRow moment_row(const EtaProblem& p, TypePair t, double scale) {
    SparseRow row;
    const auto coef = moment_coefficients(p, t);
    row.index.reserve(coef.size());
    row.value.reserve(coef.size());
    for (std::size_t i = 0; i < coef.size(); ++i)
        if (coef[i] != 0.0)
            row.add(i, scale * coef[i]);
    return row;
}

void add_interval_rows(LinearProgram& lp, const EtaProblem& p, const IntervalConstraint& iv) {
    require_defined(iv.pair, p.ends);
    if (iv.lower > iv.upper)
        throw Error("interval lower bound exceeds upper bound for " + iv.pair.label());
    SparseRow upper = moment_row(p, iv.pair, 1.0);
    upper.rhs = g_map(iv.pair, iv.upper, p.ends);
    SparseRow lower = moment_row(p, iv.pair, -1.0);
    lower.rhs = -g_map(iv.pair, iv.lower, p.ends);
    lp.ub.push_back(std::move(upper));
    lp.ub.push_back(std::move(lower));
}

// Cells of the northwest-corner transportation plan: a spanning tree of
// rows + cols - 1 cells whose basic solution meets both marginals.
std::vector<std::size_t> northwest_corner(const EtaProblem& p) {
    std::vector<std::size_t> cells;
    std::vector<double> supply = p.source_mass, demand = p.target_mass;
    std::size_t r = 0, c = 0;
    while (r < p.rows() && c < p.cols()) {
        cells.push_back(r * p.cols() + c);
        const double q = std::min(supply[r], demand[c]);
        supply[r] -= q;
        demand[c] -= q;
        if (r + 1 == p.rows())
            ++c;
        else if (c + 1 == p.cols() || supply[r] <= demand[c])
            ++r;
        else
            ++c;
    }
    return cells;
}

LinearProgram marginal_system(const EtaProblem& p) {
    if (p.rows() == 0 || p.cols() == 0)
        throw Error("degree-pair distribution has no edge ends");
    LinearProgram lp;
    lp.num_vars = p.num_vars();
    for (std::size_t r = 0; r < p.rows(); ++r) {
        SparseRow row;
        for (std::size_t c = 0; c < p.cols(); ++c)
            row.add(r * p.cols() + c, 1.0);
        row.rhs = p.source_mass[r];
        lp.eq.push_back(std::move(row));
    }
    for (std::size_t c = 0; c < p.cols(); ++c) {
        SparseRow row;
        for (std::size_t r = 0; r < p.rows(); ++r)
            row.add(r * p.cols() + c, 1.0);
        row.rhs = p.target_mass[c];
        lp.eq.push_back(std::move(row));
    }
    lp.start_hint = northwest_corner(p);
    return lp;
}

}  // namespace

LinearProgram assemble_constraints(const EtaProblem& p) {
    LinearProgram lp = marginal_system(p);
    if (p.targets)
        for (auto t : kAllTypePairs) {
            require_defined(t, p.ends);
            SparseRow row = moment_row(p, t, 1.0);
            row.rhs = g_map(t, (*p.targets)[t], p.ends);
            lp.eq.push_back(std::move(row));
        }
    for (const auto& iv : p.intervals)
        add_interval_rows(lp, p, iv);
    return lp;
}

EdgeMixMatrix eta_from_solution(const EtaProblem& p, std::span<const double> h) {
    EdgeMixMatrix eta;
    eta.source_pairs = p.source_pairs;
    eta.target_pairs = p.target_pairs;
    eta.h.assign(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(p.num_vars()));
    for (auto& v : eta.h)
        v = std::max(v, 0.0);
    return eta;
}

namespace {

// Appends variable mu (the share of the independent coupling s t^T) to an
// assembled system. Each row's coefficient is the row's activity at s t^T.
LinearProgram with_independent_share(const EtaProblem& p, LinearProgram lp) {
    const std::size_t mu = lp.num_vars;
    lp.num_vars += 1;
    auto independent_activity = [&](const SparseRow& row) {
        double a = 0.0;
        for (std::size_t k = 0; k < row.index.size(); ++k) {
            const std::size_t r = row.index[k] / p.cols(), c = row.index[k] % p.cols();
            a += row.value[k] * p.source_mass[r] * p.target_mass[c];
        }
        return a;
    };
    for (auto* rows : {&lp.eq, &lp.ub})
        for (auto& row : *rows) {
            const double a = independent_activity(row);
            if (a != 0.0)
                row.add(mu, a);
        }
    lp.objective.assign(lp.num_vars, 0.0);
    lp.objective[mu] = -1.0;
    return lp;
}

}  // namespace

std::optional<EdgeMixMatrix> max_entropy_eta(const EtaProblem& p, std::size_t max_newton_steps) {
    if (!p.targets)
        throw Error("max_entropy_eta needs four target coefficients");
    const std::size_t R = p.rows(), C = p.cols(), N = R + C + 4;
    if (R == 0 || C == 0)
        throw Error("degree-pair distribution has no edge ends");

    // Standardized end degrees: with both marginals fixed, the coefficient
    // r(a,b) is exactly sum eta * zx_a * zy_b.
    std::array<std::vector<double>, 2> zx, zy;
    for (int a = 0; a < 2; ++a) {
        const auto type = static_cast<std::uint8_t>(a + 1);
        if (!(p.ends.sigma_q[a] > 0.0) || !(p.ends.sigma_q_tilde[a] > 0.0))
            return std::nullopt;
        for (const auto& sp : p.source_pairs)
            zx[a].push_back((degree_of_type(sp, type) - p.ends.mean_q[a]) / p.ends.sigma_q[a]);
        for (const auto& tp : p.target_pairs)
            zy[a].push_back((degree_of_type(tp, type) - p.ends.mean_q_tilde[a]) / p.ends.sigma_q_tilde[a]);
    }
    auto feature = [&](int t, std::size_t r, std::size_t c) {
        const TypePair tp = kAllTypePairs[t];
        return zx[tp.source_type - 1][r] * zy[tp.target_type - 1][c];
    };
    std::vector<double> log_base(R * C);
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t c = 0; c < C; ++c)
            log_base[r * C + c] = std::log(p.source_mass[r]) + std::log(p.target_mass[c]);

    // Dual unknowns: row potentials, column potentials, four multipliers.
    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
    std::vector<double> h(R * C);
    auto evaluate = [&](const Eigen::VectorXd& y, std::vector<double>& out) {
        double total = 0.0;
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t c = 0; c < C; ++c) {
                double e = log_base[r * C + c] + y[r] + y[R + c];
                for (int t = 0; t < 4; ++t)
                    e += y[R + C + t] * feature(t, r, c);
                out[r * C + c] = std::exp(e);
                total += out[r * C + c];
            }
        double dual = total;
        for (std::size_t r = 0; r < R; ++r)
            dual -= y[r] * p.source_mass[r];
        for (std::size_t c = 0; c < C; ++c)
            dual -= y[R + c] * p.target_mass[c];
        for (int t = 0; t < 4; ++t)
            dual -= y[R + C + t] * p.targets->r[t];
        return dual;
    };

    double dual = evaluate(z, h);
    std::vector<double> trial(R * C);
    for (std::size_t step = 0; step < max_newton_steps; ++step) {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
        for (std::size_t r = 0; r < R; ++r)
            for (std::size_t c = 0; c < C; ++c) {
                const double v = h[r * C + c];
                std::array<double, 4> phi;
                for (int t = 0; t < 4; ++t)
                    phi[t] = feature(t, r, c);
                grad[r] += v;
                grad[R + c] += v;
                hess(r, R + c) += v;
                for (int t = 0; t < 4; ++t) {
                    grad[R + C + t] += v * phi[t];
                    hess(r, R + C + t) += v * phi[t];
                    hess(R + c, R + C + t) += v * phi[t];
                    for (int u = t; u < 4; ++u)
                        hess(R + C + t, R + C + u) += v * phi[t] * phi[u];
                }
            }
        for (std::size_t r = 0; r < R; ++r) {
            hess(r, r) = grad[r];
            grad[r] -= p.source_mass[r];
        }
        for (std::size_t c = 0; c < C; ++c) {
            hess(R + c, R + c) = grad[R + c];
            grad[R + c] -= p.target_mass[c];
        }
        for (int t = 0; t < 4; ++t)
            grad[R + C + t] -= p.targets->r[t];
        // Near the optimum the dual changes by less than its rounding error,
        // so Newton stops early and row/column scaling finishes the marginals.
        const auto dims = static_cast<Eigen::Index>(R + C);
        if (grad.head(dims).lpNorm<Eigen::Infinity>() < 1e-8 && grad.tail(4).lpNorm<Eigen::Infinity>() < 1e-7) {
            EdgeMixMatrix eta;
            eta.source_pairs = p.source_pairs;
            eta.target_pairs = p.target_pairs;
            eta.h = std::move(h);
            for (int pass = 0; pass < 50; ++pass) {
                double worst = 0.0;
                const auto rows = eta.row_sums();
                for (std::size_t r = 0; r < R; ++r) {
                    worst = std::max(worst, std::abs(rows[r] - p.source_mass[r]));
                    for (std::size_t c = 0; c < C; ++c)
                        eta.at(r, c) *= p.source_mass[r] / rows[r];
                }
                const auto cols = eta.col_sums();
                for (std::size_t c = 0; c < C; ++c) {
                    worst = std::max(worst, std::abs(cols[c] - p.target_mass[c]));
                    for (std::size_t r = 0; r < R; ++r)
                        eta.at(r, c) *= p.target_mass[c] / cols[c];
                }
                if (worst < 1e-14)
                    break;
            }
            return eta;
        }
        // Potentials are defined up to a shared shift; the ridge fixes it.
        hess.diagonal().array() += 1e-12;
        const Eigen::VectorXd dir = hess.selfadjointView<Eigen::Upper>().ldlt().solve(-grad);
        if (!dir.allFinite())
            return std::nullopt;
        // Diverging multipliers mean the targets sit on or beyond the
        // boundary of the attainable set.
        if ((z.tail(4) + dir.tail(4)).lpNorm<Eigen::Infinity>() > 1e4)
            return std::nullopt;
        const double slope = grad.dot(dir);
        double t = 1.0;
        for (;; t *= 0.5) {
            if (t < 1e-10)
                return std::nullopt;
            const Eigen::VectorXd y = z + t * dir;
            const double next = evaluate(y, trial);
            if (std::isfinite(next) && next <= dual + 1e-4 * t * slope) {
                z = y;
                dual = next;
                std::swap(h, trial);
                break;
            }
        }
    }
    return std::nullopt;
}

std::optional<EdgeMixMatrix> solve_target_eta(const EtaProblem& p, const EtaSolveOptions& options) {
    if (!p.targets)
        throw Error("solve_target_eta needs four target coefficients");
    for (auto t : kAllTypePairs) {
        const double r = (*p.targets)[t];
        if (!(r >= -1.0 && r <= 1.0))
            throw Error("target " + t.label() + " outside [-1, 1]");
        require_defined(t, p.ends);
    }

    EdgeMixMatrix eta;
    std::optional<EdgeMixMatrix> smooth;
    if (options.shape == EtaShape::MaxEntropy)
        smooth = max_entropy_eta(p, options.max_newton_steps);
    if (smooth) {
        eta = std::move(*smooth);
    } else if (options.shape != EtaShape::Vertex) {
        const LinearProgram lp = with_independent_share(p, assemble_constraints(p));
        const LpSolution sol = solve(lp, options.lp);
        if (sol.status == LpStatus::Infeasible)
            return std::nullopt;
        if (sol.status != LpStatus::Optimal)
            throw LpError("eta program reported " + to_string(sol.status));
        const double share = std::clamp(sol.x[p.num_vars()], 0.0, 1.0);
        eta = eta_from_solution(p, sol.x);
        for (std::size_t r = 0; r < p.rows(); ++r)
            for (std::size_t c = 0; c < p.cols(); ++c)
                eta.at(r, c) += share * p.source_mass[r] * p.target_mass[c];
    } else {
        const LpSolution sol = solve_feasibility(assemble_constraints(p), options.lp);
        if (sol.status == LpStatus::Infeasible)
            return std::nullopt;
        eta = eta_from_solution(p, sol.x);
    }

    const auto rows = eta.row_sums();
    const auto cols = eta.col_sums();
    for (std::size_t r = 0; r < p.rows(); ++r)
        if (std::abs(rows[r] - p.source_mass[r]) > kMarginalTol)
            throw LpError("eta solution violates a source marginal");
    for (std::size_t c = 0; c < p.cols(); ++c)
        if (std::abs(cols[c] - p.target_mass[c]) > kMarginalTol)
            throw LpError("eta solution violates a target marginal");
    const AssortProfile achieved = assortativity(eta, p.ends);
    if (achieved.max_abs_diff(*p.targets) > kReconstructionTol)
        throw LpError("eta solution misses its targets");
    return eta;
}

namespace {

CoefficientBounds bounds_for(const EtaProblem& p, const LinearProgram& constraints, TypePair t,
                             const LpOptions& options) {
    require_defined(t, p.ends);
    LinearProgram lp = constraints;
    lp.objective = moment_coefficients(p, t);
    const LpSolution low = solve(lp, options);
    if (low.status == LpStatus::Infeasible)
        throw UnattainableError("conditioning intervals unattainable");
    for (auto& c : lp.objective)
        c = -c;
    const LpSolution high = solve(lp, options);
    if (low.status != LpStatus::Optimal || high.status != LpStatus::Optimal)
        throw LpError("bound program did not reach an optimum");

    auto to_coefficient = [&](double moment) {
        double r = g_inverse(t, moment, p.ends);
        if (std::abs(r) > 1.0 + kBoundClampSlack)
            throw LpError("bound " + std::to_string(r) + " for " + t.label() + " outside [-1, 1]");
        return std::clamp(r, -1.0, 1.0);
    };
    return {to_coefficient(low.objective_value), to_coefficient(-high.objective_value)};
}

}  // namespace

AssortBounds coefficient_bounds(const EtaProblem& p, std::span<const TypePair> order, const LpOptions& options) {
    auto in_order = [&](TypePair t) { return std::find(order.begin(), order.end(), t) != order.end(); };
    EtaProblem conditioned = p;
    conditioned.targets.reset();
    conditioned.intervals.clear();
    for (const auto& iv : p.intervals)
        if (!in_order(iv.pair))
            conditioned.intervals.push_back(iv);

    AssortBounds result;
    for (auto t : order) {
        const auto b = bounds_for(conditioned, assemble_constraints(conditioned), t, options);
        result[t] = b;
        for (const auto& iv : p.intervals) {
            if (iv.pair != t)
                continue;
            if (iv.upper < b.lower - kBoundClampSlack || iv.lower > b.upper + kBoundClampSlack)
                throw UnattainableError("conditioning intervals unattainable: " + t.label() + " interval outside [" +
                            std::to_string(b.lower) + ", " + std::to_string(b.upper) + "]");
            conditioned.intervals.push_back(iv);
        }
    }
    return result;
}

void write_bounds_csv_header(std::ostream& out) {
    out << "conditioned_pair,conditioned_value,pair,lower,upper\n";
}

void write_bounds_csv_rows(std::ostream& out, const std::string& conditioned_pair,
                           std::optional<double> conditioned_value,
                           const AssortBounds& bounds) {
    const auto old = out.precision(12);
    for (auto t : kAllTypePairs) {
        const auto& b = bounds[t];
        if (!b)
            continue;
        out << conditioned_pair << ',';
        if (conditioned_value)
            out << *conditioned_value;
        out << ',' << t.label() << ',' << b->lower << ','
            << b->upper << '\n';
    }
    out.precision(old);
}

}  // namespace didpr
