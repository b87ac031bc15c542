#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "didpr/generators.hpp"
#include "didpr/graph.hpp"

namespace didpr {

/// 1 - |V| / |E|. Throws when there are more nodes than edges.
double beta_hat(std::size_t num_nodes, std::size_t num_edges);
double beta_hat(const DirectedGraph& g);

struct TailFit {
    double iota = 0.0;     // power-law exponent minus one
    Degree x_min = 0;
    double ks = 0.0;       // KS distance at the chosen threshold
    std::size_t n_tail = 0;
};

/// Minimum-distance discrete power-law fit. Every distinct positive value
/// with at least `min_tail` observations at or above it, two of them
/// distinct, is tried as x_min; the exponent at each comes from maximum
/// likelihood. Zeros are ignored. Throws with fewer than 50 positive values
/// or when no threshold qualifies.
TailFit tail_index(std::span<const Degree> degrees, std::size_t min_tail = 10);

/// Tail indices implied by DPA parameters.
double iota_out(double alpha, double beta, double gamma, double delta_out);
double iota_in(double alpha, double beta, double gamma, double delta_in);

struct Offsets {
    double delta_out;
    double delta_in;
};

/// Inverse of iota_out / iota_in for the offsets. No sign check.
Offsets invert_offsets(double alpha, double beta, double gamma, double iota1, double iota2);

struct PolarPoint {
    double radius;  // d1 + d2^a
    double angle;   // d2^a / radius
};

/// L1 polar coordinates of (d1, d2^a) per node; nodes with both degrees
/// zero are dropped. Throws when a <= 0 or every node is dropped.
std::vector<PolarPoint> polar_transform(std::span<const Degree> d1, std::span<const Degree> d2, double a);

/// Angles of the points whose radius exceeds the (n_tail+1)-th largest.
std::vector<double> tail_angles(std::span<const PolarPoint> points, std::size_t n_tail);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct EvFitOptions {
    std::size_t n_tail = 200;
    std::size_t grid_points = 21;     // alpha candidates across [0, 1 - beta]
    std::size_t sims_per_point = 2;   // pooled simulated samples per candidate
    std::uint64_t seed = 1;
};

struct EvFit {
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    double gamma_hat = 0.0;
    double delta_in_hat = 0.0;
    double delta_out_hat = 0.0;
    double iota1_hat = 0.0;
    double iota2_hat = 0.0;
    std::size_t n_tail = 0;
    double a_hat = 0.0;

    DpaParams as_params(std::size_t target_edges, std::uint64_t seed) const;
};

/// Extreme-value fit of the DPA model. alpha is picked by matching the
/// tail-angle sample against DPA simulations on a grid, run twice so the
/// offsets used in the second pass come from the first pass's alpha.
/// Throws "inconsistent tail estimates" when an inverted offset is not
/// positive.
EvFit fit_ev(const DirectedGraph& g, const EvFitOptions& options = {});

std::string to_json(const EvFit& fit);
EvFit ev_fit_from_json(const std::string& text);

}  // namespace didpr
