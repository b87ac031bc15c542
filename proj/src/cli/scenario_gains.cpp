#include "didpr/scenario_gains.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "didpr/error.hpp"

namespace didpr {

ScenarioBucket bucket_of(Scenario a, Scenario b) {
    if (a == Scenario::Seed || b == Scenario::Seed)
        return ScenarioBucket::Seed;
    if (a > b)
        std::swap(a, b);
    // Letters sort as 'a' < 'b' < 'g'.
    if (a == Scenario::Alpha)
        return b == Scenario::Alpha ? ScenarioBucket::AlphaAlpha
               : b == Scenario::Beta ? ScenarioBucket::AlphaBeta
                                     : ScenarioBucket::AlphaGamma;
    if (a == Scenario::Beta)
        return b == Scenario::Beta ? ScenarioBucket::BetaBeta : ScenarioBucket::BetaGamma;
    return ScenarioBucket::GammaGamma;
}

std::string_view bucket_label(ScenarioBucket b) {
    static constexpr std::array<std::string_view, kNumBuckets> labels{"aa", "ab", "ag", "bb", "bg", "gg", "seed"};
    return labels[static_cast<std::size_t>(b)];
}

ScenarioGains scenario_gains(const DpaGraph& dpa, const EdgeMixMatrix& eta, const RewiringConfig& cfg) {
    const DirectedGraph& g = dpa.graph;
    if (dpa.scenarios.size() != g.num_edges())
        throw Error("scenario labels do not cover every edge");

    // Edge-end standard deviations; rewiring never changes them.
    const double m = static_cast<double>(g.num_edges());
    std::array<double, 2> sd_src{}, sd_tgt{};
    for (int a = 0; a < 2; ++a) {
        long double sx = 0, sxx = 0, sy = 0, syy = 0;
        for (const auto& e : g.edges()) {
            const long double x = degree_of_type(g.degree_pair(e.source), a + 1);
            const long double y = degree_of_type(g.degree_pair(e.target), a + 1);
            sx += x;
            sxx += x * x;
            sy += y;
            syy += y * y;
        }
        sd_src[a] = static_cast<double>(std::sqrt(std::max<long double>(0, sxx / m - (sx / m) * (sx / m))));
        sd_tgt[a] = static_cast<double>(std::sqrt(std::max<long double>(0, syy / m - (sy / m) * (sy / m))));
    }

    // Exact integer sums of moment changes per bucket and type pair.
    std::array<std::array<std::int64_t, 4>, kNumBuckets> delta{};
    ScenarioGains out;
    const auto observer = [&](const DirectedGraph& now, std::size_t e1, std::size_t e2) {
        // After the swap e1 = (v1, v4) and e2 = (v3, v2).
        const Edge a = now.edge(e1), b = now.edge(e2);
        const DegreePair v1 = now.degree_pair(a.source), v4 = now.degree_pair(a.target);
        const DegreePair v3 = now.degree_pair(b.source), v2 = now.degree_pair(b.target);
        const auto k = static_cast<std::size_t>(bucket_of(dpa.scenarios[e1], dpa.scenarios[e2]));
        for (auto t : kAllTypePairs) {
            const std::int64_t x1 = degree_of_type(v1, t.source_type), x3 = degree_of_type(v3, t.source_type);
            const std::int64_t y2 = degree_of_type(v2, t.target_type), y4 = degree_of_type(v4, t.target_type);
            delta[k][t.index()] -= (x1 - x3) * (y2 - y4);
        }
        ++out.accepted[k];
    };

    out.initial = assortativity_from_edges(g, true);
    out.run = rewire(g, eta, cfg, observer);
    out.final = assortativity_from_edges(out.run.graph, true);
    for (std::size_t k = 0; k < kNumBuckets; ++k)
        for (auto t : kAllTypePairs) {
            const double scale = m * sd_src[t.source_type - 1] * sd_tgt[t.target_type - 1];
            out.increase[k][t] = scale > 0.0 ? static_cast<double>(delta[k][t.index()]) / scale
                                             : std::numeric_limits<double>::quiet_NaN();
        }
    return out;
}

}  // namespace didpr
