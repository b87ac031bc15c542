#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "didpr/assortativity.hpp"
#include "didpr/generators.hpp"
#include "didpr/rewiring.hpp"

namespace didpr {

/// Unordered pair of edge-creation scenarios of two swapped edges. Pairs
/// involving the seed self-loop share one bucket.
enum class ScenarioBucket : std::size_t { AlphaAlpha, AlphaBeta, AlphaGamma, BetaBeta, BetaGamma, GammaGamma, Seed };

inline constexpr std::size_t kNumBuckets = 7;

ScenarioBucket bucket_of(Scenario a, Scenario b);
std::string_view bucket_label(ScenarioBucket b);

struct ScenarioGains {
    /// Total change of each coefficient from accepted swaps, per bucket.
    std::array<AssortProfile, kNumBuckets> increase{};
    std::array<std::size_t, kNumBuckets> accepted{};
    AssortProfile initial;
    AssortProfile final;
    RewireResult run;
};

/// Rewire a labelled DPA graph toward eta, attributing each accepted swap's
/// change in the four coefficients to the bucket of the two edges' labels.
/// A swap of (v1,v2),(v3,v4) changes sum(x_src * y_tgt) by
/// -(x1 - x3)(y2 - y4) while the end distributions stay fixed, so the
/// bucket totals telescope to final - initial. Undefined coefficients stay
/// NaN.
ScenarioGains scenario_gains(const DpaGraph& dpa, const EdgeMixMatrix& eta, const RewiringConfig& cfg);

}  // namespace didpr
