#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "didpr/graph.hpp"
#include "didpr/random.hpp"

namespace didpr {

/// Directed Erdos-Renyi graph: each of the n^2 ordered pairs, self-pairs
/// included, carries an edge independently with probability p.
DirectedGraph gen_er(std::size_t n, double p, std::uint64_t seed);

/// Edge-creation scenario of a preferential-attachment step. Seed marks the
/// self-loop the process starts from.
enum class Scenario : char { Alpha = 'a', Beta = 'b', Gamma = 'g', Seed = 's' };

char scenario_letter(Scenario s);
Scenario scenario_from_letter(char c);

struct DpaParams {
    double alpha = 1.0 / 3.0;
    double beta = 1.0 / 3.0;
    double gamma = 1.0 / 3.0;
    double delta_in = 1.0;
    double delta_out = 1.0;
    std::size_t target_edges = 1000;
    std::uint64_t seed = 1;

    /// Throws on probabilities outside [0,1], alpha+beta+gamma != 1 (1e-12),
    /// non-positive offsets or zero edges.
    void validate() const;
};

struct DpaGraph {
    DirectedGraph graph;
    std::vector<Scenario> scenarios;  // one label per edge, edge order
};

/// Weighted sampler over a growing set of slots backed by a Fenwick tree.
/// Each slot's weight is count + offset; counts change by whole units.
class PreferentialIndex {
public:
    PreferentialIndex(std::size_t capacity, double offset);

    std::size_t size() const noexcept { return size_; }
    double total() const noexcept { return total_; }
    double weight(std::size_t slot) const;

    /// Append a slot with count 0 (weight = offset).
    void add_slot();
    void increment(std::size_t slot);
    std::size_t sample(Rng& rng) const;

private:
    void add(std::size_t slot, double w);

    std::vector<double> tree_;
    std::size_t size_ = 0;
    double offset_;
    double total_ = 0.0;
    std::size_t top_bit_ = 1;
};

/// Directed preferential attachment grown edge by edge from a single node
/// carrying a self-loop. The result has target_edges + 1 edges.
DpaGraph gen_dpa(const DpaParams& params);

/// Label of an edge; throws when the graph carries no labels.
Scenario scenario_of_edge(std::span<const Scenario> scenarios, std::size_t edge);

/// One letter per line, edge order.
void write_scenarios(std::span<const Scenario> scenarios, std::ostream& out);
std::vector<Scenario> read_scenarios(std::istream& in);

}  // namespace didpr
