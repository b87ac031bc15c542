#include "didpr/fit_ev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <boost/math/tools/minima.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>
#include "json.hpp"

#include "didpr/error.hpp"

namespace didpr {

double beta_hat(std::size_t num_nodes, std::size_t num_edges) {
    if (num_edges == 0 || num_nodes > num_edges)
        throw Error("more nodes than edges; beta_hat undefined");
    return 1.0 - static_cast<double>(num_nodes) / static_cast<double>(num_edges);
}

double beta_hat(const DirectedGraph& g) { return beta_hat(g.num_nodes(), g.num_edges()); }

namespace {

double hurwitz_zeta(double s, double q) {
    static const bool quiet = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)quiet;
    gsl_sf_result result;
    if (gsl_sf_hzeta_e(s, q, &result) != GSL_SUCCESS)
        throw Error("Hurwitz zeta evaluation failed");
    return result.val;
}

constexpr double kMinExponent = 1.0 + 1e-6;
constexpr double kMaxExponent = 10.0;

}  // namespace

TailFit tail_index(std::span<const Degree> degrees, std::size_t min_tail) {
    std::vector<Degree> x;
    for (Degree d : degrees)
        if (d > 0)
            x.push_back(d);
    if (x.size() < 50)
        throw Error("tail fit needs at least 50 positive degrees");
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();

    // suffix_log[i] = sum of log x[j] for j >= i
    std::vector<double> suffix_log(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;)
        suffix_log[i] = suffix_log[i + 1] + std::log(static_cast<double>(x[i]));

    std::optional<TailFit> best;
    for (std::size_t start = 0; start < n;) {
        const Degree x_min = x[start];
        std::size_t next = start;
        while (next < n && x[next] == x_min)
            ++next;
        const std::size_t m = n - start;
        if (m < min_tail || next == n)
            break;

        const double sum_log = suffix_log[start];
        auto neg_loglik = [&](double a) {
            return a * sum_log + static_cast<double>(m) * std::log(hurwitz_zeta(a, x_min));
        };
        const double a = boost::math::tools::brent_find_minima(neg_loglik, kMinExponent, kMaxExponent, 40).first;

        // KS distance at the observed values of the tail.
        const double norm = hurwitz_zeta(a, x_min);
        double ks = 0.0;
        for (std::size_t i = start; i < n;) {
            std::size_t j = i;
            while (j < n && x[j] == x[i])
                ++j;
            const double empirical = static_cast<double>(j - start) / static_cast<double>(m);
            const double model = 1.0 - hurwitz_zeta(a, static_cast<double>(x[i]) + 1.0) / norm;
            ks = std::max(ks, std::abs(empirical - model));
            i = j;
        }
        if (!best || ks < best->ks)
            best = TailFit{a - 1.0, x_min, ks, m};
        start = next;
    }
    if (!best)
        throw Error("no power-law tail: no threshold leaves enough distinct values");
    return *best;
}

double iota_out(double alpha, double beta, double gamma, double delta_out) {
    return (1.0 + delta_out * (alpha + gamma)) / (beta + gamma);
}

double iota_in(double alpha, double beta, double gamma, double delta_in) {
    return (1.0 + delta_in * (alpha + gamma)) / (alpha + beta);
}

Offsets invert_offsets(double alpha, double beta, double gamma, double iota1, double iota2) {
    return {(iota1 * (beta + gamma) - 1.0) / (alpha + gamma), (iota2 * (alpha + beta) - 1.0) / (alpha + gamma)};
}

std::vector<PolarPoint> polar_transform(std::span<const Degree> d1, std::span<const Degree> d2, double a) {
    if (!(a > 0.0))
        throw Error("polar transform exponent must be positive");
    if (d1.size() != d2.size())
        throw Error("degree lists differ in length");
    std::vector<PolarPoint> points;
    points.reserve(d1.size());
    for (std::size_t v = 0; v < d1.size(); ++v) {
        if (d1[v] == 0 && d2[v] == 0)
            continue;
        const double powered = std::pow(static_cast<double>(d2[v]), a);
        const double radius = static_cast<double>(d1[v]) + powered;
        points.push_back({radius, powered / radius});
    }
    if (points.empty())
        throw Error("every node has degree zero");
    return points;
}

std::vector<double> tail_angles(std::span<const PolarPoint> points, std::size_t n_tail) {
    if (points.size() <= n_tail)
        throw Error("fewer nodes than n_tail + 1");
    std::vector<double> radii;
    radii.reserve(points.size());
    for (const auto& p : points)
        radii.push_back(p.radius);
    std::nth_element(radii.begin(), radii.begin() + static_cast<std::ptrdiff_t>(n_tail), radii.end(),
                     std::greater<>());
    const double threshold = radii[n_tail];
    std::vector<double> angles;
    for (const auto& p : points)
        if (p.radius > threshold)
            angles.push_back(p.angle);
    return angles;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw Error("KS statistic needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x)
            ++i;
        while (j < b.size() && b[j] == x)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

DpaParams EvFit::as_params(std::size_t target_edges, std::uint64_t seed) const {
    DpaParams p;
    p.alpha = alpha_hat;
    p.beta = beta_hat;
    p.gamma = gamma_hat;
    p.delta_in = delta_in_hat;
    p.delta_out = delta_out_hat;
    p.target_edges = target_edges;
    p.seed = seed;
    return p;
}

namespace {

Offsets checked_offsets(double alpha, double beta, double gamma, double iota1, double iota2) {
    const Offsets o = invert_offsets(alpha, beta, gamma, iota1, iota2);
    if (!(o.delta_out > 0.0) || !(o.delta_in > 0.0))
        throw Error("inconsistent tail estimates: inverted offsets are not positive");
    return o;
}

}  // namespace

EvFit fit_ev(const DirectedGraph& g, const EvFitOptions& options) {
    if (options.n_tail < 50)
        throw Error("n_tail must be at least 50");
    if (options.grid_points < 2 || options.sims_per_point < 1)
        throw Error("alpha grid needs at least two points and one simulation each");

    EvFit fit;
    fit.n_tail = options.n_tail;
    fit.beta_hat = beta_hat(g);
    fit.iota1_hat = tail_index(g.out_degrees()).iota;
    fit.iota2_hat = tail_index(g.in_degrees()).iota;
    fit.a_hat = fit.iota2_hat / fit.iota1_hat;
    const auto observed = tail_angles(polar_transform(g.out_degrees(), g.in_degrees(), fit.a_hat), options.n_tail);

    const double spread = 1.0 - fit.beta_hat;  // alpha + gamma
    if (!(spread > 0.0))
        throw Error("beta_hat is 1; alpha and gamma cannot be separated");
    double alpha = spread / 2.0;
    Offsets offsets = checked_offsets(alpha, fit.beta_hat, spread - alpha, fit.iota1_hat, fit.iota2_hat);

    std::uint64_t stream = 0;
    for (int pass = 0; pass < 2; ++pass) {
        double best_ks = std::numeric_limits<double>::infinity();
        double best_alpha = alpha;
        for (std::size_t k = 0; k < options.grid_points; ++k) {
            const double candidate = spread * static_cast<double>(k) / static_cast<double>(options.grid_points - 1);
            std::vector<double> simulated;
            for (std::size_t s = 0; s < options.sims_per_point; ++s) {
                DpaParams p;
                p.alpha = candidate;
                p.beta = fit.beta_hat;
                p.gamma = std::max(0.0, 1.0 - candidate - fit.beta_hat);
                p.delta_out = offsets.delta_out;
                p.delta_in = offsets.delta_in;
                p.target_edges = g.num_edges() - 1;
                p.seed = stream_seed(options.seed, stream++);
                const DirectedGraph sim = gen_dpa(p).graph;
                const auto angles = tail_angles(polar_transform(sim.out_degrees(), sim.in_degrees(), fit.a_hat),
                                                options.n_tail);
                simulated.insert(simulated.end(), angles.begin(), angles.end());
            }
            const double ks = ks_two_sample(observed, simulated);
            if (ks < best_ks) {
                best_ks = ks;
                best_alpha = candidate;
            }
        }
        alpha = best_alpha;
        offsets = checked_offsets(alpha, fit.beta_hat, spread - alpha, fit.iota1_hat, fit.iota2_hat);
    }

    fit.alpha_hat = alpha;
    fit.gamma_hat = 1.0 - fit.alpha_hat - fit.beta_hat;
    fit.delta_out_hat = offsets.delta_out;
    fit.delta_in_hat = offsets.delta_in;
    return fit;
}

std::string to_json(const EvFit& fit) {
    const nlohmann::json j = {
        {"alpha_hat", fit.alpha_hat},         {"beta_hat", fit.beta_hat},
        {"gamma_hat", fit.gamma_hat},         {"delta_in_hat", fit.delta_in_hat},
        {"delta_out_hat", fit.delta_out_hat}, {"iota1_hat", fit.iota1_hat},
        {"iota2_hat", fit.iota2_hat},         {"n_tail", fit.n_tail},
        {"a_hat", fit.a_hat},
    };
    return j.dump(2);
}

EvFit ev_fit_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        EvFit fit;
        fit.alpha_hat = j.at("alpha_hat").get<double>();
        fit.beta_hat = j.at("beta_hat").get<double>();
        fit.gamma_hat = j.at("gamma_hat").get<double>();
        fit.delta_in_hat = j.at("delta_in_hat").get<double>();
        fit.delta_out_hat = j.at("delta_out_hat").get<double>();
        fit.iota1_hat = j.at("iota1_hat").get<double>();
        fit.iota2_hat = j.at("iota2_hat").get<double>();
        fit.n_tail = j.at("n_tail").get<std::size_t>();
        fit.a_hat = j.value("a_hat", fit.iota2_hat / fit.iota1_hat);
        return fit;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("bad fit JSON: ") + e.what());
    }
}

}  // namespace didpr
