#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "didpr/assortativity.hpp"
#include "didpr/graph.hpp"
#include "didpr/lp.hpp"

namespace didpr {

/// Raised when conditioning intervals admit no eta.
class UnattainableError : public Error {
public:
    using Error::Error;
};

/// Bound L <= r(a,b) <= U imposed while searching for eta. L == U pins the
/// coefficient to a single value.
struct IntervalConstraint {
    TypePair pair;
    double lower;
    double upper;
};

/// Everything fixed by the degree-pair distribution nu, plus optional
/// targets and conditioning intervals. Rewiring preserves nu, so this is the
/// complete description of the attainable set.
struct EtaProblem {
    DegreePairDist nu;
    std::vector<DegreePair> source_pairs;
    std::vector<double> source_mass;  // i nu_ij / sum(i nu)
    std::vector<DegreePair> target_pairs;
    std::vector<double> target_mass;  // l nu_kl / sum(l nu)
    EndDistributions ends;
    std::optional<AssortProfile> targets;
    std::vector<IntervalConstraint> intervals;

    static EtaProblem from_nu(DegreePairDist nu);
    static EtaProblem from_graph(const DirectedGraph& g);

    std::size_t rows() const noexcept { return source_pairs.size(); }
    std::size_t cols() const noexcept { return target_pairs.size(); }
    std::size_t num_vars() const noexcept { return rows() * cols(); }
};

/// Affine map from a coefficient value to the degree-product moment
/// sum_{k,l} k l e^(a,b)_{kl}; throws when the coefficient is undefined.
double g_map(TypePair t, double r, const EndDistributions& ends);
/// Inverse of g_map.
double g_inverse(TypePair t, double moment, const EndDistributions& ends);

/// Linear coefficients of sum_{k,l} k l e^(a,b)_{kl} over the row-major
/// entries of H.
std::vector<double> moment_coefficients(const EtaProblem& p, TypePair t);

/// Constraint system over the entries of H (row-major): row and column
/// marginal equalities, one equality per target, and two inequalities per
/// interval. The two marginal families share total mass 1, so one row is
/// redundant; it is kept.
LinearProgram assemble_constraints(const EtaProblem& p);

/// Pack an LP solution over H into an EdgeMixMatrix for p's support.
EdgeMixMatrix eta_from_solution(const EtaProblem& p, std::span<const double> h);

/// Which feasible eta to return when several exist.
enum class EtaShape {
    /// Closest to the independent coupling in relative entropy. Strictly
    /// positive, and its log entries are affine in the degree products, so
    /// rewiring drifts steadily toward the targets. Falls back to
    /// IndependentShare when the dual iteration does not converge.
    MaxEntropy,
    /// A simplex vertex mixed with the largest feasible share of the
    /// independent coupling.
    IndependentShare,
    /// The first feasible simplex vertex.
    Vertex,
};

struct EtaSolveOptions {
    EtaShape shape = EtaShape::MaxEntropy;
    std::size_t max_newton_steps = 100;
    LpOptions lp;
};

/// Relative-entropy projection of the independent coupling onto the target
/// constraints; nullopt when the Newton iteration fails to converge, which
/// happens for unattainable targets and for targets on the boundary.
std::optional<EdgeMixMatrix> max_entropy_eta(const EtaProblem& p, std::size_t max_newton_steps = 100);

/// eta with the requested four coefficients, or nullopt when they are not
/// jointly attainable for p.nu. A converged max-entropy solution is itself a
/// feasibility witness; otherwise the LP decides.
std::optional<EdgeMixMatrix> solve_target_eta(const EtaProblem& p, const EtaSolveOptions& options = {});

struct CoefficientBounds {
    double lower;
    double upper;
};

struct AssortBounds {
    std::array<std::optional<CoefficientBounds>, 4> bounds;

    const std::optional<CoefficientBounds>& operator[](TypePair t) const { return bounds[t.index()]; }
    std::optional<CoefficientBounds>& operator[](TypePair t) { return bounds[t.index()]; }
};

/// Sequential conditional bounds. Pairs are visited in `order`; each pair's
/// bounds honour every interval in p.intervals whose pair is not in `order`
/// plus the intervals of pairs visited earlier. Throws UnattainableError
/// when the accumulated intervals admit no eta.
AssortBounds coefficient_bounds(const EtaProblem& p, std::span<const TypePair> order = kAllTypePairs,
                                const LpOptions& options = {});

/// CSV header and rows: conditioned_pair,conditioned_value,pair,lower,upper.
/// Unconditional rows use "none" and an empty value.
void write_bounds_csv_header(std::ostream& out);
void write_bounds_csv_rows(std::ostream& out, const std::string& conditioned_pair,
                           std::optional<double> conditioned_value,
                           const AssortBounds& bounds);

}  // namespace didpr
