#include "didpr/assortativity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "didpr/error.hpp"

namespace didpr {

std::string TypePair::label() const {
    return "r" + std::to_string(source_type) + std::to_string(target_type);
}

TypePair type_pair_from_label(const std::string& label) {
    for (auto t : kAllTypePairs)
        if (label == t.label() || label == t.label().substr(1))
            return t;
    throw Error("unknown coefficient '" + label + "' (expected r11, r12, r21 or r22)");
}

double AssortProfile::max_abs_diff(const AssortProfile& other) const {
    // NaN propagates so an undefined coefficient never counts as close.
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double d = std::abs(r[i] - other.r[i]);
        if (!(d <= worst))
            worst = d;
    }
    return worst;
}

namespace {

std::optional<std::size_t> find_pair(const std::vector<DegreePair>& pairs, DegreePair p) {
    auto it = std::lower_bound(pairs.begin(), pairs.end(), p);
    if (it == pairs.end() || *it != p)
        return std::nullopt;
    return static_cast<std::size_t>(it - pairs.begin());
}

// Mean and standard deviation of a finite distribution given as a map.
// Two-pass so a point mass yields exactly zero.
std::pair<double, double> moments(const std::map<Degree, double>& dist) {
    double total = 0.0, mean = 0.0;
    for (const auto& [k, p] : dist) {
        total += p;
        mean += static_cast<double>(k) * p;
    }
    mean /= total;
    double var = 0.0;
    for (const auto& [k, p] : dist) {
        const double d = static_cast<double>(k) - mean;
        var += d * d * p;
    }
    return {mean, std::sqrt(var / total)};
}

}  // namespace

std::optional<std::size_t> EdgeMixMatrix::source_index(DegreePair p) const {
    return find_pair(source_pairs, p);
}

std::optional<std::size_t> EdgeMixMatrix::target_index(DegreePair p) const {
    return find_pair(target_pairs, p);
}

std::vector<double> EdgeMixMatrix::row_sums() const {
    std::vector<double> sums(rows(), 0.0);
    for (std::size_t r = 0; r < rows(); ++r)
        for (std::size_t c = 0; c < cols(); ++c)
            sums[r] += at(r, c);
    return sums;
}

std::vector<double> EdgeMixMatrix::col_sums() const {
    std::vector<double> sums(cols(), 0.0);
    for (std::size_t r = 0; r < rows(); ++r)
        for (std::size_t c = 0; c < cols(); ++c)
            sums[c] += at(r, c);
    return sums;
}

EdgeMixMatrix edge_mix_from_graph(const DirectedGraph& g) {
    if (g.num_edges() == 0)
        throw Error("graph has no edges; edge mixing undefined");
    EdgeMixMatrix eta;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        const auto p = g.degree_pair(v);
        if (p.out > 0)
            eta.source_pairs.push_back(p);
        if (p.in > 0)
            eta.target_pairs.push_back(p);
    }
    for (auto* pairs : {&eta.source_pairs, &eta.target_pairs}) {
        std::sort(pairs->begin(), pairs->end());
        pairs->erase(std::unique(pairs->begin(), pairs->end()), pairs->end());
    }
    std::vector<std::size_t> row_of(g.num_nodes(), 0), col_of(g.num_nodes(), 0);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        const auto p = g.degree_pair(v);
        if (p.out > 0)
            row_of[v] = *eta.source_index(p);
        if (p.in > 0)
            col_of[v] = *eta.target_index(p);
    }
    std::vector<std::size_t> counts(eta.rows() * eta.cols(), 0);
    for (const auto& e : g.edges())
        ++counts[row_of[e.source] * eta.cols() + col_of[e.target]];
    eta.h.resize(counts.size());
    const double m = static_cast<double>(g.num_edges());
    for (std::size_t i = 0; i < counts.size(); ++i)
        eta.h[i] = static_cast<double>(counts[i]) / m;
    return eta;
}

namespace {

template <class Weight>
std::pair<std::vector<DegreePair>, std::vector<double>> weighted_masses(const DegreePairDist& nu,
                                                                        Weight weight) {
    std::vector<DegreePair> pairs;
    std::vector<double> mass;
    double total = 0.0;
    for (const auto& [p, share] : nu) {
        const double w = weight(p) * share;
        if (w > 0.0) {
            pairs.push_back(p);
            mass.push_back(w);
            total += w;
        }
    }
    if (total <= 0.0)
        throw Error("degree-pair distribution carries no edges");
    for (auto& x : mass)
        x /= total;
    return {std::move(pairs), std::move(mass)};
}

}  // namespace

std::pair<std::vector<DegreePair>, std::vector<double>> source_masses(const DegreePairDist& nu) {
    return weighted_masses(nu, [](DegreePair p) { return static_cast<double>(p.out); });
}

std::pair<std::vector<DegreePair>, std::vector<double>> target_masses(const DegreePairDist& nu) {
    return weighted_masses(nu, [](DegreePair p) { return static_cast<double>(p.in); });
}

EndDistributions end_distributions(std::span<const DegreePair> source_pairs,
                                   std::span<const double> source_mass,
                                   std::span<const DegreePair> target_pairs,
                                   std::span<const double> target_mass) {
    EndDistributions ends;
    for (std::size_t r = 0; r < source_pairs.size(); ++r) {
        if (source_mass[r] <= 0.0)
            continue;
        ends.q[0][source_pairs[r].out] += source_mass[r];
        ends.q[1][source_pairs[r].in] += source_mass[r];
    }
    for (std::size_t c = 0; c < target_pairs.size(); ++c) {
        if (target_mass[c] <= 0.0)
            continue;
        ends.q_tilde[0][target_pairs[c].out] += target_mass[c];
        ends.q_tilde[1][target_pairs[c].in] += target_mass[c];
    }
    for (int t = 0; t < 2; ++t) {
        std::tie(ends.mean_q[t], ends.sigma_q[t]) = moments(ends.q[t]);
        std::tie(ends.mean_q_tilde[t], ends.sigma_q_tilde[t]) = moments(ends.q_tilde[t]);
    }
    return ends;
}

EndDistributions end_distributions(const EdgeMixMatrix& eta) {
    const auto rows = eta.row_sums();
    const auto cols = eta.col_sums();
    return end_distributions(eta.source_pairs, rows, eta.target_pairs, cols);
}

double degree_product_moment(const EdgeMixMatrix& eta, TypePair t) {
    double s = 0.0;
    for (std::size_t r = 0; r < eta.rows(); ++r) {
        const double x = degree_of_type(eta.source_pairs[r], t.source_type);
        double row = 0.0;
        for (std::size_t c = 0; c < eta.cols(); ++c)
            row += degree_of_type(eta.target_pairs[c], t.target_type) * eta.at(r, c);
        s += x * row;
    }
    return s;
}

AssortProfile assortativity(const EdgeMixMatrix& eta, const EndDistributions& ends) {
    AssortProfile profile;
    for (auto t : kAllTypePairs) {
        const double denom = ends.sigma_product(t);
        if (!(denom > 0.0))
            throw Error("degenerate end distribution; assortativity undefined (" + t.label() + ")");
        profile[t] = (degree_product_moment(eta, t) - ends.independent_moment(t)) / denom;
    }
    return profile;
}

AssortProfile assortativity(const EdgeMixMatrix& eta) {
    return assortativity(eta, end_distributions(eta));
}

AssortProfile assortativity_of_graph(const DirectedGraph& g) {
    return assortativity(edge_mix_from_graph(g));
}

AssortProfile assortativity_from_edges(const DirectedGraph& g, bool allow_degenerate) {
    if (g.num_edges() == 0)
        throw Error("graph has no edges; edge mixing undefined");
    // Integer sums are exact; only the final divisions round.
    std::array<long double, 2> sum_x{}, sum_xx{}, sum_y{}, sum_yy{};
    std::array<long double, 4> sum_xy{};
    for (const auto& e : g.edges()) {
        const std::array<long double, 2> x{static_cast<long double>(g.out_degree(e.source)),
                                           static_cast<long double>(g.in_degree(e.source))};
        const std::array<long double, 2> y{static_cast<long double>(g.out_degree(e.target)),
                                           static_cast<long double>(g.in_degree(e.target))};
        for (int a = 0; a < 2; ++a) {
            sum_x[a] += x[a];
            sum_xx[a] += x[a] * x[a];
            sum_y[a] += y[a];
            sum_yy[a] += y[a] * y[a];
        }
        for (auto t : kAllTypePairs)
            sum_xy[t.index()] += x[t.source_type - 1] * y[t.target_type - 1];
    }
    const long double m = static_cast<long double>(g.num_edges());
    AssortProfile profile;
    for (auto t : kAllTypePairs) {
        const int a = t.source_type - 1, b = t.target_type - 1;
        const long double var_x = sum_xx[a] / m - (sum_x[a] / m) * (sum_x[a] / m);
        const long double var_y = sum_yy[b] / m - (sum_y[b] / m) * (sum_y[b] / m);
        if (!(var_x > 0) || !(var_y > 0)) {
            if (!allow_degenerate)
                throw Error("degenerate end distribution; assortativity undefined (" + t.label() + ")");
            profile[t] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const long double cov = sum_xy[t.index()] / m - (sum_x[a] / m) * (sum_y[b] / m);
        profile[t] = static_cast<double>(cov / std::sqrt(var_x * var_y));
    }
    return profile;
}

void write_edge_mix_csv(const EdgeMixMatrix& eta, std::ostream& out) {
    out << "i,j,k,l,eta\n";
    out << std::setprecision(17);
    for (std::size_t r = 0; r < eta.rows(); ++r)
        for (std::size_t c = 0; c < eta.cols(); ++c) {
            const double v = eta.at(r, c);
            if (v > 0.0)
                out << eta.source_pairs[r].out << ',' << eta.source_pairs[r].in << ','
                    << eta.target_pairs[c].out << ',' << eta.target_pairs[c].in << ',' << v << '\n';
        }
}

EdgeMixMatrix read_edge_mix_csv(std::istream& in) {
    struct Entry {
        DegreePair src, dst;
        double value;
    };
    std::vector<Entry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.rfind("i,", 0) == 0)
            continue;
        std::istringstream fields(line);
        std::array<long long, 4> d{};
        double v = 0.0;
        char comma = 0;
        fields >> d[0] >> comma >> d[1] >> comma >> d[2] >> comma >> d[3] >> comma >> v;
        if (!fields || d[0] < 0 || d[1] < 0 || d[2] < 0 || d[3] < 0 || v < 0.0)
            throw ParseError(lineno, "expected 'i,j,k,l,eta' with nonnegative values");
        entries.push_back({{static_cast<Degree>(d[0]), static_cast<Degree>(d[1])},
                           {static_cast<Degree>(d[2]), static_cast<Degree>(d[3])},
                           v});
    }
    EdgeMixMatrix eta;
    for (const auto& e : entries) {
        eta.source_pairs.push_back(e.src);
        eta.target_pairs.push_back(e.dst);
    }
    for (auto* pairs : {&eta.source_pairs, &eta.target_pairs}) {
        std::sort(pairs->begin(), pairs->end());
        pairs->erase(std::unique(pairs->begin(), pairs->end()), pairs->end());
    }
    eta.h.assign(eta.rows() * eta.cols(), 0.0);
    for (const auto& e : entries)
        eta.at(*eta.source_index(e.src), *eta.target_index(e.dst)) += e.value;
    return eta;
}

}  // namespace didpr
