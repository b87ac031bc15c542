#include "didpr/rewiring.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <set>

#include "didpr/error.hpp"
#include "didpr/random.hpp"

namespace didpr {

void RewiringConfig::validate() const {
    if (max_steps < 1)
        throw Error("max_steps must be at least 1");
    if (checkpoint_every < 1)
        throw Error("checkpoint_every must be at least 1");
    if (!(tolerance > 0.0))
        throw Error("tolerance must be positive");
}

std::optional<std::size_t> RewiringTrace::first_within(const AssortProfile& targets, double tolerance) const {
    for (std::size_t i = 0; i < checkpoints.size(); ++i)
        if (checkpoints[i].profile.max_abs_diff(targets) <= tolerance)
            return i;
    return std::nullopt;
}

void write_trace_csv(const RewiringTrace& trace, std::ostream& out) {
    const auto old = out.precision(10);
    out << "step,r11,r12,r21,r22,acc_rate\n";
    for (const auto& c : trace.checkpoints) {
        out << c.step;
        for (double r : c.profile.r)
            out << ',' << r;
        out << ',' << c.acceptance_rate << '\n';
    }
    out.precision(old);
}

namespace {

struct SwapEntries {
    double present1, present2;  // eta(v1,v2), eta(v3,v4)
    double swapped1, swapped2;  // eta(v1,v4), eta(v3,v2)
};

SwapEntries lookup(const EdgeMixMatrix& eta, const SwapDegrees& d) {
    auto row = [&](DegreePair p) {
        const auto i = eta.source_index(p);
        if (!i)
            throw Error("source degree pair missing from eta");
        return *i;
    };
    auto col = [&](DegreePair p) {
        const auto i = eta.target_index(p);
        if (!i)
            throw Error("target degree pair missing from eta");
        return *i;
    };
    const std::size_t r1 = row(d.v1), r3 = row(d.v3), c2 = col(d.v2), c4 = col(d.v4);
    return {eta.at(r1, c2), eta.at(r3, c4), eta.at(r1, c4), eta.at(r3, c2)};
}

double accept_from(double present1, double present2, double swapped1, double swapped2) {
    if (present1 == 0.0 || present2 == 0.0)
        return 1.0;
    return std::min(1.0, (swapped1 * swapped2) / (present1 * present2));
}

}  // namespace

double acceptance_probability(const EdgeMixMatrix& eta, const SwapDegrees& d) {
    const auto e = lookup(eta, d);
    return accept_from(e.present1, e.present2, e.swapped1, e.swapped2);
}

double balance_ratio(const EdgeMixMatrix& eta, const SwapDegrees& d) {
    const auto e = lookup(eta, d);
    if (e.present1 == 0.0 || e.present2 == 0.0 || e.swapped1 == 0.0 || e.swapped2 == 0.0)
        throw Error("balance ratio needs positive eta entries");
    // The reverse move swaps (v1,v4),(v3,v2) back to (v1,v2),(v3,v4).
    const double forward = accept_from(e.present1, e.present2, e.swapped1, e.swapped2);
    const double reverse = accept_from(e.swapped1, e.swapped2, e.present1, e.present2);
    return forward / reverse;
}

namespace {

void check_support(const DirectedGraph& g, const EdgeMixMatrix& eta) {
    std::set<DegreePair> sources, targets;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        const DegreePair p = g.degree_pair(v);
        if (p.out > 0)
            sources.insert(p);
        if (p.in > 0)
            targets.insert(p);
    }
    if (!std::ranges::equal(sources, eta.source_pairs) || !std::ranges::equal(targets, eta.target_pairs))
        throw Error("eta support does not match the graph's degree pairs");
    if (eta.h.size() != eta.rows() * eta.cols())
        throw Error("eta entry count does not match its index sets");
}

}  // namespace

RewireResult rewire(DirectedGraph g, const EdgeMixMatrix& eta, const RewiringConfig& cfg,
                    const SwapObserver& observer) {
    cfg.validate();
    if (g.num_edges() < 2)
        throw Error("rewiring needs at least two edges");
    check_support(g, eta);
    std::optional<AssortProfile> targets;
    if (cfg.stop_early)
        targets = assortativity(eta);

    // Degrees never change, so each node's eta row and column are fixed.
    constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> row_of(g.num_nodes(), kNone), col_of(g.num_nodes(), kNone);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        const DegreePair p = g.degree_pair(v);
        if (p.out > 0)
            row_of[v] = static_cast<std::uint32_t>(*eta.source_index(p));
        if (p.in > 0)
            col_of[v] = static_cast<std::uint32_t>(*eta.target_index(p));
    }

    RewireResult result;
    Rng rng(cfg.seed);
    std::size_t accepted_since = 0, steps_since = 0;
    auto checkpoint = [&](std::size_t step) {
        Checkpoint c;
        c.step = step;
        c.profile = assortativity_from_edges(g, true);
        c.acceptance_rate = steps_since ? static_cast<double>(accepted_since) / static_cast<double>(steps_since) : 0.0;
        result.trace.checkpoints.push_back(c);
        accepted_since = steps_since = 0;
        return targets && c.profile.max_abs_diff(*targets) <= cfg.tolerance;
    };

    checkpoint(0);
    std::size_t step = 0;
    while (step < cfg.max_steps) {
        const auto [e1, e2] = sample_edge_pair(g, rng);
        const Edge a = g.edge(e1), b = g.edge(e2);
        const double p = accept_from(eta.at(row_of[a.source], col_of[a.target]),
                                     eta.at(row_of[b.source], col_of[b.target]),
                                     eta.at(row_of[a.source], col_of[b.target]),
                                     eta.at(row_of[b.source], col_of[a.target]));
        ++step;
        ++steps_since;
        if (rng.uniform01() < p) {
            g.swap_targets(e1, e2);
            ++result.accepted;
            ++accepted_since;
            if (observer)
                observer(g, e1, e2);
        }
        if (step % cfg.checkpoint_every == 0 || step == cfg.max_steps) {
            if (checkpoint(step)) {
                result.trace.stopped_early = step < cfg.max_steps;
                break;
            }
        }
    }
    result.steps = step;
    result.graph = std::move(g);
    return result;
}

}  // namespace didpr
