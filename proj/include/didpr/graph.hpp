#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "didpr/random.hpp"

namespace didpr {

using NodeId = std::uint32_t;
using Degree = std::uint32_t;

struct Edge {
    NodeId source;
    NodeId target;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// (out-degree, in-degree) of a node.
struct DegreePair {
    Degree out;
    Degree in;

    friend bool operator==(const DegreePair&, const DegreePair&) = default;
    friend auto operator<=>(const DegreePair&, const DegreePair&) = default;
};

/// Directed multigraph stored as an edge array with maintained per-node
/// out/in-degree counters. Self-loops and parallel edges are allowed; node
/// ids are dense in [0, num_nodes).
class DirectedGraph {
public:
    DirectedGraph() = default;
    explicit DirectedGraph(std::size_t num_nodes);
    DirectedGraph(std::size_t num_nodes, std::vector<Edge> edges);

    NodeId add_node();
    void add_edge(NodeId source, NodeId target);

    std::size_t num_nodes() const noexcept { return out_deg_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }

    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(std::size_t index) const { return edges_.at(index); }

    Degree out_degree(NodeId v) const { return out_deg_.at(v); }
    Degree in_degree(NodeId v) const { return in_deg_.at(v); }
    DegreePair degree_pair(NodeId v) const { return {out_deg_.at(v), in_deg_.at(v)}; }
    std::span<const Degree> out_degrees() const noexcept { return out_deg_; }
    std::span<const Degree> in_degrees() const noexcept { return in_deg_; }

    /// Replace edges (v1,v2) at e1 and (v3,v4) at e2 with (v1,v4) and (v3,v2).
    /// Every degree counter is unchanged by construction.
    void swap_targets(std::size_t e1, std::size_t e2);

    /// True when the maintained counters equal a recount from the edge list.
    bool degrees_consistent() const;

private:
    std::vector<Edge> edges_;
    std::vector<Degree> out_deg_;
    std::vector<Degree> in_deg_;
};

/// nu: proportion of nodes with each (out, in) degree pair. Only pairs that
/// occur are stored.
using DegreePairDist = std::map<DegreePair, double>;

DegreePairDist degree_pair_dist(const DirectedGraph& g);

/// Two distinct edge indices, uniform over unordered pairs.
std::pair<std::size_t, std::size_t> sample_edge_pair(const DirectedGraph& g, Rng& rng);

/// Checked wrapper around DirectedGraph::swap_targets.
void swap_edges(DirectedGraph& g, std::size_t e1, std::size_t e2);

/// Sorted copies of the out- and in-degree sequences.
std::pair<std::vector<Degree>, std::vector<Degree>> sorted_degree_sequences(const DirectedGraph& g);

/// Parse "src dst" lines (tab or space separated). Lines starting with '#'
/// or '%' are comments; a "# nodes=N" comment declares the node count so
/// isolated trailing nodes survive a round trip.
DirectedGraph read_edge_list(std::istream& in);
DirectedGraph read_edge_list_file(const std::string& path);

/// Writes a "# nodes=N" header followed by one "src\tdst" line per edge in
/// storage order.
void write_edge_list(const DirectedGraph& g, std::ostream& out);
void write_edge_list_file(const DirectedGraph& g, const std::string& path);

}  // namespace didpr
