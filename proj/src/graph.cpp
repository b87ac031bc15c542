#include "didpr/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "didpr/error.hpp"

namespace didpr {

DirectedGraph::DirectedGraph(std::size_t num_nodes) : out_deg_(num_nodes, 0), in_deg_(num_nodes, 0) {}

DirectedGraph::DirectedGraph(std::size_t num_nodes, std::vector<Edge> edges)
    : edges_(std::move(edges)), out_deg_(num_nodes, 0), in_deg_(num_nodes, 0) {
    for (const auto& e : edges_) {
        if (e.source >= num_nodes || e.target >= num_nodes)
            throw Error("edge endpoint out of range");
        ++out_deg_[e.source];
        ++in_deg_[e.target];
    }
}

NodeId DirectedGraph::add_node() {
    out_deg_.push_back(0);
    in_deg_.push_back(0);
    return static_cast<NodeId>(out_deg_.size() - 1);
}

void DirectedGraph::add_edge(NodeId source, NodeId target) {
    if (source >= num_nodes() || target >= num_nodes())
        throw Error("edge endpoint out of range");
    edges_.push_back({source, target});
    ++out_deg_[source];
    ++in_deg_[target];
}

void DirectedGraph::swap_targets(std::size_t e1, std::size_t e2) {
    std::swap(edges_[e1].target, edges_[e2].target);
}

bool DirectedGraph::degrees_consistent() const {
    std::vector<Degree> out(num_nodes(), 0), in(num_nodes(), 0);
    for (const auto& e : edges_) {
        ++out[e.source];
        ++in[e.target];
    }
    return out == out_deg_ && in == in_deg_;
}

DegreePairDist degree_pair_dist(const DirectedGraph& g) {
    if (g.num_nodes() == 0)
        throw Error("empty graph");
    std::map<DegreePair, std::size_t> counts;
    for (NodeId v = 0; v < g.num_nodes(); ++v)
        ++counts[g.degree_pair(v)];
    DegreePairDist nu;
    const double n = static_cast<double>(g.num_nodes());
    for (const auto& [pair, c] : counts)
        nu.emplace(pair, static_cast<double>(c) / n);
    return nu;
}

std::pair<std::size_t, std::size_t> sample_edge_pair(const DirectedGraph& g, Rng& rng) {
    const std::size_t m = g.num_edges();
    if (m < 2)
        throw Error("need at least 2 edges to sample a pair");
    const auto first = static_cast<std::size_t>(rng.below(m));
    // Draw from the remaining m-1 indices so the pair is distinct.
    auto second = static_cast<std::size_t>(rng.below(m - 1));
    if (second >= first)
        ++second;
    return {first, second};
}

void swap_edges(DirectedGraph& g, std::size_t e1, std::size_t e2) {
    if (e1 >= g.num_edges() || e2 >= g.num_edges())
        throw Error("edge index out of range");
    if (e1 == e2)
        throw Error("swap requires two distinct edges");
    g.swap_targets(e1, e2);
}

std::pair<std::vector<Degree>, std::vector<Degree>> sorted_degree_sequences(const DirectedGraph& g) {
    std::vector<Degree> out(g.out_degrees().begin(), g.out_degrees().end());
    std::vector<Degree> in(g.in_degrees().begin(), g.in_degrees().end());
    std::sort(out.begin(), out.end());
    std::sort(in.begin(), in.end());
    return {std::move(out), std::move(in)};
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view next_token(std::string_view& rest) {
    std::size_t i = 0;
    while (i < rest.size() && is_space(rest[i]))
        ++i;
    std::size_t j = i;
    while (j < rest.size() && !is_space(rest[j]))
        ++j;
    auto token = rest.substr(i, j - i);
    rest.remove_prefix(j);
    return token;
}

std::uint64_t parse_id(std::string_view token, std::size_t line) {
    if (token.empty())
        throw ParseError(line, "expected two node ids");
    if (token.front() == '-')
        throw ParseError(line, "negative node id '" + std::string(token) + "'");
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError(line, "non-integer node id '" + std::string(token) + "'");
    if (value >= std::numeric_limits<NodeId>::max())
        throw ParseError(line, "node id too large");
    return value;
}

}  // namespace

DirectedGraph read_edge_list(std::istream& in) {
    std::vector<Edge> edges;
    std::size_t declared = 0;
    std::uint64_t max_id = 0;
    bool any = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view rest(line);
        while (!rest.empty() && is_space(rest.front()))
            rest.remove_prefix(1);
        if (rest.empty())
            continue;
        if (rest.front() == '#' || rest.front() == '%') {
            constexpr std::string_view key = "nodes=";
            auto pos = rest.find(key);
            if (pos != std::string_view::npos) {
                auto tail = rest.substr(pos + key.size());
                auto token = next_token(tail);
                declared = static_cast<std::size_t>(parse_id(token, lineno));
            }
            continue;
        }
        const auto src = parse_id(next_token(rest), lineno);
        const auto dst = parse_id(next_token(rest), lineno);
        // KONECT files carry optional weight/timestamp columns; ignore them.
        edges.push_back({static_cast<NodeId>(src), static_cast<NodeId>(dst)});
        max_id = std::max({max_id, src, dst});
        any = true;
    }
    const std::size_t implied = any ? static_cast<std::size_t>(max_id) + 1 : 0;
    if (declared != 0 && declared < implied)
        throw ParseError(lineno, "declared node count smaller than largest id");
    return DirectedGraph(std::max(declared, implied), std::move(edges));
}

DirectedGraph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "'");
    return read_edge_list(in);
}

void write_edge_list(const DirectedGraph& g, std::ostream& out) {
    out << "# nodes=" << g.num_nodes() << '\n';
    for (const auto& e : g.edges())
        out << e.source << '\t' << e.target << '\n';
}

void write_edge_list_file(const DirectedGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write '" + path + "'");
    write_edge_list(g, out);
}

}  // namespace didpr
