#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "didpr/assortativity.hpp"
#include "didpr/graph.hpp"

namespace didpr {

struct RewiringConfig {
    std::size_t max_steps = 100000;
    std::size_t checkpoint_every = 1000;
    double tolerance = 0.05;  // per coefficient, used by stop_early
    bool stop_early = false;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Profile after `step` proposals. acceptance_rate covers the proposals since
/// the previous checkpoint; it is 0 for the step-0 entry.
struct Checkpoint {
    std::size_t step = 0;
    AssortProfile profile;
    double acceptance_rate = 0.0;
};

struct RewiringTrace {
    std::vector<Checkpoint> checkpoints;
    bool stopped_early = false;

    /// Index of the first checkpoint whose four coefficients all lie within
    /// `tolerance` of `targets`.
    std::optional<std::size_t> first_within(const AssortProfile& targets, double tolerance) const;
};

/// CSV: step,r11,r12,r21,r22,acc_rate
void write_trace_csv(const RewiringTrace& trace, std::ostream& out);

/// Degree pairs at the four ends of a proposed swap of (v1,v2),(v3,v4).
struct SwapDegrees {
    DegreePair v1, v2, v3, v4;
};

/// min(1, eta(v1,v4) eta(v3,v2) / (eta(v1,v2) eta(v3,v4))). A zero factor in
/// the denominator gives 1 so the chain can leave configurations the target
/// assigns no mass. Throws when a pair is missing from eta.
double acceptance_probability(const EdgeMixMatrix& eta, const SwapDegrees& d);

/// Forward over reverse acceptance probability. Throws on zero entries.
double balance_ratio(const EdgeMixMatrix& eta, const SwapDegrees& d);

/// Called after each accepted swap with the updated graph and the two edge
/// positions. Each edge keeps its source, so labels follow positions.
using SwapObserver = std::function<void(const DirectedGraph&, std::size_t, std::size_t)>;

struct RewireResult {
    DirectedGraph graph;
    RewiringTrace trace;
    std::size_t accepted = 0;
    std::size_t steps = 0;
};

/// Degree-preserving Metropolis chain whose stationary edge mixing is eta.
/// Checkpoints are taken at step 0, every checkpoint_every steps and at the
/// final step; undefined coefficients are recorded as NaN. Early stopping
/// compares against assortativity(eta). Throws when eta's support differs
/// from the graph's degree pairs.
RewireResult rewire(DirectedGraph g, const EdgeMixMatrix& eta, const RewiringConfig& cfg,
                    const SwapObserver& observer = {});

}  // namespace didpr
