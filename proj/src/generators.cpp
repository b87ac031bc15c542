#include "didpr/generators.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "didpr/error.hpp"

namespace didpr {

DirectedGraph gen_er(std::size_t n, double p, std::uint64_t seed) {
    if (n == 0)
        throw Error("ER graph needs at least one node");
    if (!(p >= 0.0 && p <= 1.0))
        throw Error("ER edge probability must lie in [0, 1]");
    Rng rng(seed);
    DirectedGraph g(n);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = 0; v < n; ++v)
            if (rng.bernoulli(p))
                g.add_edge(u, v);
    return g;
}

char scenario_letter(Scenario s) { return static_cast<char>(s); }

Scenario scenario_from_letter(char c) {
    switch (c) {
    case 'a': return Scenario::Alpha;
    case 'b': return Scenario::Beta;
    case 'g': return Scenario::Gamma;
    case 's': return Scenario::Seed;
    default: throw Error(std::string("unknown scenario letter '") + c + "'");
    }
}

void DpaParams::validate() const {
    for (double x : {alpha, beta, gamma})
        if (!(x >= 0.0 && x <= 1.0))
            throw Error("scenario probabilities must lie in [0, 1]");
    if (std::abs(alpha + beta + gamma - 1.0) > 1e-12)
        throw Error("alpha + beta + gamma must equal 1");
    if (!(delta_in > 0.0) || !(delta_out > 0.0))
        throw Error("offsets delta_in and delta_out must be positive");
    if (target_edges == 0)
        throw Error("target_edges must be at least 1");
}

PreferentialIndex::PreferentialIndex(std::size_t capacity, double offset)
    : tree_(capacity + 1, 0.0), offset_(offset) {
    while (top_bit_ * 2 <= capacity)
        top_bit_ *= 2;
}

void PreferentialIndex::add(std::size_t slot, double w) {
    for (std::size_t i = slot + 1; i < tree_.size(); i += i & (~i + 1))
        tree_[i] += w;
    total_ += w;
}

double PreferentialIndex::weight(std::size_t slot) const {
    // prefix(slot + 1) - prefix(slot)
    auto prefix = [&](std::size_t n) {
        double s = 0.0;
        for (std::size_t i = n; i > 0; i -= i & (~i + 1))
            s += tree_[i];
        return s;
    };
    return prefix(slot + 1) - prefix(slot);
}

void PreferentialIndex::add_slot() {
    if (size_ + 1 >= tree_.size())
        throw Error("preferential index capacity exceeded");
    add(size_++, offset_);
}

void PreferentialIndex::increment(std::size_t slot) { add(slot, 1.0); }

std::size_t PreferentialIndex::sample(Rng& rng) const {
    double u = rng.uniform01() * total_;
    std::size_t pos = 0;
    for (std::size_t step = top_bit_; step > 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next < tree_.size() && tree_[next] <= u) {
            pos = next;
            u -= tree_[next];
        }
    }
    // pos slots have cumulative weight <= u; rounding can push past the end.
    return pos < size_ ? pos : size_ - 1;
}

DpaGraph gen_dpa(const DpaParams& params) {
    params.validate();
    Rng rng(params.seed);
    const std::size_t capacity = params.target_edges + 2;
    PreferentialIndex by_out(capacity, params.delta_out);
    PreferentialIndex by_in(capacity, params.delta_in);

    DpaGraph out;
    out.graph = DirectedGraph();
    out.scenarios.reserve(params.target_edges + 1);
    auto new_node = [&] {
        by_out.add_slot();
        by_in.add_slot();
        return out.graph.add_node();
    };
    auto link = [&](NodeId s, NodeId t, Scenario label) {
        out.graph.add_edge(s, t);
        by_out.increment(s);
        by_in.increment(t);
        out.scenarios.push_back(label);
    };

    const NodeId seed_node = new_node();
    link(seed_node, seed_node, Scenario::Seed);

    for (std::size_t step = 0; step < params.target_edges; ++step) {
        const double u = rng.uniform01();
        if (u < params.alpha) {
            const auto target = static_cast<NodeId>(by_in.sample(rng));
            link(new_node(), target, Scenario::Alpha);
        } else if (u < params.alpha + params.beta) {
            const auto source = static_cast<NodeId>(by_out.sample(rng));
            const auto target = static_cast<NodeId>(by_in.sample(rng));
            link(source, target, Scenario::Beta);
        } else {
            const auto source = static_cast<NodeId>(by_out.sample(rng));
            link(source, new_node(), Scenario::Gamma);
        }
    }
    return out;
}

Scenario scenario_of_edge(std::span<const Scenario> scenarios, std::size_t edge) {
    if (scenarios.empty())
        throw Error("no scenario labels");
    if (edge >= scenarios.size())
        throw Error("edge index out of range");
    return scenarios[edge];
}

void write_scenarios(std::span<const Scenario> scenarios, std::ostream& out) {
    for (auto s : scenarios)
        out << scenario_letter(s) << '\n';
}

std::vector<Scenario> read_scenarios(std::istream& in) {
    std::vector<Scenario> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line.size() != 1)
            throw ParseError(lineno, "expected a single scenario letter");
        try {
            labels.push_back(scenario_from_letter(line[0]));
        } catch (const Error& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return labels;
}

}  // namespace didpr
