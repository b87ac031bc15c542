#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "didpr/graph.hpp"

namespace didpr {

/// Degree types: 1 = out-degree, 2 = in-degree. A TypePair (a, b) selects
/// the type-a degree of an edge's source and the type-b degree of its target.
struct TypePair {
    int source_type;
    int target_type;

    /// Position in an AssortProfile: (1,1)->0, (1,2)->1, (2,1)->2, (2,2)->3.
    constexpr std::size_t index() const {
        return static_cast<std::size_t>(2 * (source_type - 1) + (target_type - 1));
    }
    friend constexpr bool operator==(const TypePair&, const TypePair&) = default;

    std::string label() const;  // "r11", "r12", ...
};

inline constexpr TypePair kOutOut{1, 1};
inline constexpr TypePair kOutIn{1, 2};
inline constexpr TypePair kInOut{2, 1};
inline constexpr TypePair kInIn{2, 2};
inline constexpr std::array<TypePair, 4> kAllTypePairs{kOutOut, kOutIn, kInOut, kInIn};

TypePair type_pair_from_label(const std::string& label);

/// Degree of the requested type read from a (out, in) pair.
constexpr Degree degree_of_type(DegreePair p, int type) { return type == 1 ? p.out : p.in; }

/// The four directed assortativity coefficients r(a,b), stored in
/// TypePair::index() order.
struct AssortProfile {
    std::array<double, 4> r{};

    double& operator[](TypePair t) { return r[t.index()]; }
    double operator[](TypePair t) const { return r[t.index()]; }
    double max_abs_diff(const AssortProfile& other) const;
};

/// Source-end (q) and target-end (q~) degree marginals of edges for both
/// degree types, with their standard deviations. Indexing is [type - 1].
struct EndDistributions {
    std::array<std::map<Degree, double>, 2> q;
    std::array<std::map<Degree, double>, 2> q_tilde;
    std::array<double, 2> mean_q{};
    std::array<double, 2> mean_q_tilde{};
    std::array<double, 2> sigma_q{};
    std::array<double, 2> sigma_q_tilde{};

    /// sum_{k,l} k l q_k^(a) q~_l^(b), the degree-product moment under independence.
    double independent_moment(TypePair t) const {
        return mean_q[t.source_type - 1] * mean_q_tilde[t.target_type - 1];
    }
    double sigma_product(TypePair t) const {
        return sigma_q[t.source_type - 1] * sigma_q_tilde[t.target_type - 1];
    }
};

/// eta: joint distribution of edges over (source degree pair, target degree
/// pair). Only pairs carrying positive source (resp. target) mass are
/// materialized; h is row-major with one row per source pair.
struct EdgeMixMatrix {
    std::vector<DegreePair> source_pairs;  // sorted ascending
    std::vector<DegreePair> target_pairs;  // sorted ascending
    std::vector<double> h;

    std::size_t rows() const noexcept { return source_pairs.size(); }
    std::size_t cols() const noexcept { return target_pairs.size(); }
    double at(std::size_t row, std::size_t col) const { return h[row * cols() + col]; }
    double& at(std::size_t row, std::size_t col) { return h[row * cols() + col]; }

    std::optional<std::size_t> source_index(DegreePair p) const;
    std::optional<std::size_t> target_index(DegreePair p) const;

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
};

/// Proportion of edges for every (source pair, target pair) combination.
EdgeMixMatrix edge_mix_from_graph(const DirectedGraph& g);

/// Source mass i*nu_ij / sum(i*nu) over pairs with i > 0, sorted by pair.
std::pair<std::vector<DegreePair>, std::vector<double>> source_masses(const DegreePairDist& nu);
/// Target mass l*nu_kl / sum(l*nu) over pairs with l > 0, sorted by pair.
std::pair<std::vector<DegreePair>, std::vector<double>> target_masses(const DegreePairDist& nu);

EndDistributions end_distributions(std::span<const DegreePair> source_pairs,
                                   std::span<const double> source_mass,
                                   std::span<const DegreePair> target_pairs,
                                   std::span<const double> target_mass);
EndDistributions end_distributions(const EdgeMixMatrix& eta);

/// sum_{k,l} k l e^(a,b)_{kl} for the given eta.
double degree_product_moment(const EdgeMixMatrix& eta, TypePair t);

/// Throws when any of the four standard deviations is zero.
AssortProfile assortativity(const EdgeMixMatrix& eta);
AssortProfile assortativity(const EdgeMixMatrix& eta, const EndDistributions& ends);
AssortProfile assortativity_of_graph(const DirectedGraph& g);

/// Same quantity evaluated edge by edge from population moments, without
/// building eta. Used for cheap checkpoints during rewiring. With
/// allow_degenerate, undefined coefficients come back as NaN instead of
/// throwing.
AssortProfile assortativity_from_edges(const DirectedGraph& g, bool allow_degenerate = false);

/// CSV rows "i,j,k,l,eta" for every positive entry.
void write_edge_mix_csv(const EdgeMixMatrix& eta, std::ostream& out);
EdgeMixMatrix read_edge_mix_csv(std::istream& in);

}  // namespace didpr
