#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "didpr/error.hpp"
#include "didpr/fit_ev.hpp"
#include "didpr/generators.hpp"

using namespace didpr;

namespace {

// Exact Zipf(exponent) draws on {1, 2, ...} by Devroye's rejection method.
Degree zipf(Rng& rng, double exponent) {
    const double b = std::pow(2.0, exponent - 1.0);
    while (true) {
        const double u = 1.0 - rng.uniform01();
        const double v = rng.uniform01();
        const double x = std::floor(std::pow(u, -1.0 / (exponent - 1.0)));
        if (x > 4e9)
            continue;
        const double t = std::pow(1.0 + 1.0 / x, exponent - 1.0);
        if (v * x * (t - 1.0) / (b - 1.0) <= t / b)
            return static_cast<Degree>(x);
    }
}

std::vector<Degree> zipf_sample(std::size_t n, double exponent, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Degree> d(n);
    for (auto& x : d)
        x = zipf(rng, exponent);
    return d;
}

DpaParams dpa(double alpha, double beta, double gamma, double delta, std::size_t edges, std::uint64_t seed) {
    DpaParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.gamma = gamma;
    p.delta_in = delta;
    p.delta_out = delta;
    p.target_edges = edges;
    p.seed = seed;
    return p;
}

}  // namespace

TEST_CASE("beta estimate from node and edge counts") {
    CHECK(beta_hat(16549, 147063) == doctest::Approx(0.8875).epsilon(5e-5 / 0.8875));
    CHECK(std::round(beta_hat(16549, 147063) * 1e4) / 1e4 == 0.8875);
    CHECK(beta_hat(10, 10) == 0.0);
    CHECK(beta_hat(16549, 147063) + 16549.0 / 147063.0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(beta_hat(11, 10), Error);
}

TEST_CASE("beta estimate on a DPA sample") {
    const auto d = gen_dpa(dpa(0.05, 0.9, 0.05, 1.0, 100000, 3));
    CHECK(std::abs(beta_hat(d.graph) - 0.9) <= 0.01);
}

TEST_CASE("tail index of exact Zipf draws") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto fit = tail_index(zipf_sample(10000, 2.5, seed));
        CHECK(std::abs(fit.iota - 1.5) <= 0.1);
        CHECK(fit.x_min >= 1);
        CHECK(fit.n_tail >= 10);
        CHECK((fit.ks >= 0.0 && fit.ks <= 1.0));
    }
}

TEST_CASE("tail index ignores input order") {
    auto d = zipf_sample(3000, 2.2, 8);
    const auto a = tail_index(d);
    Rng rng(1);
    for (std::size_t i = d.size(); i > 1; --i)
        std::swap(d[i - 1], d[rng.below(i)]);
    const auto b = tail_index(d);
    CHECK(a.iota == b.iota);
    CHECK(a.x_min == b.x_min);
}

TEST_CASE("tail index rejects degenerate input") {
    CHECK_THROWS_AS(tail_index(std::vector<Degree>(500, 4)), Error);
    CHECK_THROWS_AS(tail_index(zipf_sample(40, 2.5, 1)), Error);
    std::vector<Degree> zeros(1000, 0);
    CHECK_THROWS_AS(tail_index(zeros), Error);
}

TEST_CASE("DPA marginal tails match the regular-variation indices") {
    const double alpha = 0.05, beta = 0.9, gamma = 0.05;
    const auto d = gen_dpa(dpa(alpha, beta, gamma, 1.0, 100000, 7));
    CHECK(std::abs(tail_index(d.graph.out_degrees()).iota - iota_out(alpha, beta, gamma, 1.0)) <= 0.15);
    CHECK(std::abs(tail_index(d.graph.in_degrees()).iota - iota_in(alpha, beta, gamma, 1.0)) <= 0.15);
}

TEST_CASE("offset inversion is an exact round trip") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double alpha = 0.01 + 0.4 * rng.uniform01();
        const double gamma = 0.01 + 0.4 * rng.uniform01();
        const double beta = 1.0 - alpha - gamma;
        const double d_out = 0.1 + 20 * rng.uniform01();
        const double d_in = 0.1 + 20 * rng.uniform01();
        const Offsets back = invert_offsets(alpha, beta, gamma, iota_out(alpha, beta, gamma, d_out),
                                            iota_in(alpha, beta, gamma, d_in));
        CHECK(back.delta_out == doctest::Approx(d_out).epsilon(1e-12));
        CHECK(back.delta_in == doctest::Approx(d_in).epsilon(1e-12));
    }
    CHECK(iota_out(0.05, 0.9, 0.05, 1.0) == doctest::Approx(1.1 / 0.95).epsilon(1e-15));
    // Tail indices too heavy for the scenario split give negative offsets;
    // the full fit turns those into an error.
    const Offsets bad = invert_offsets(0.1, 0.8, 0.1, 0.5, 0.5);
    CHECK(bad.delta_out < 0.0);
    CHECK(bad.delta_in < 0.0);
}

TEST_CASE("polar transform") {
    const std::vector<Degree> d1{1, 0, 0, 3, 5};
    const std::vector<Degree> d2{0, 1, 0, 2, 7};
    const auto pts = polar_transform(d1, d2, 2.0);
    REQUIRE(pts.size() == 4);  // the (0,0) node is dropped
    CHECK(pts[0].radius == 1.0);
    CHECK(pts[0].angle == 0.0);
    CHECK(pts[1].radius == 1.0);
    CHECK(pts[1].angle == 1.0);
    const std::vector<Degree> kept2{0, 1, 2, 7};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK((pts[i].angle >= 0.0 && pts[i].angle <= 1.0));
        CHECK(pts[i].radius > 0.0);
        const double expected = std::pow(static_cast<double>(kept2[i]), 2.0);
        CHECK(std::abs(pts[i].radius * pts[i].angle - expected) <= 1e-15 * std::max(1.0, expected));
    }
    const std::vector<Degree> zero{0, 0};
    CHECK_THROWS_AS(polar_transform(zero, zero, 1.0), Error);
}

TEST_CASE("tail angles use a strict threshold") {
    // Radii 1..10; the 4th largest radius is 7, so the tail is radii 8, 9, 10.
    std::vector<PolarPoint> pts;
    for (int i = 1; i <= 10; ++i)
        pts.push_back({static_cast<double>(i), i / 10.0});
    auto angles = tail_angles(pts, 3);
    std::sort(angles.begin(), angles.end());
    CHECK(angles == std::vector<double>{0.8, 0.9, 1.0});
    // Ties at the threshold are excluded.
    pts.push_back({7.0, 0.05});
    CHECK(tail_angles(pts, 3).size() == 3);
}

TEST_CASE("two-sample KS distance") {
    CHECK(ks_two_sample({0.1, 0.2, 0.3}, {0.3, 0.2, 0.1}) == 0.0);
    CHECK(ks_two_sample({0.1, 0.2}, {0.8, 0.9}) == 1.0);
    CHECK(ks_two_sample({0.1, 0.2, 0.3, 0.4}, {0.3, 0.4, 0.5, 0.6}) == doctest::Approx(0.5));
}

TEST_CASE("full fit recovers a known DPA model") {
    const double alpha = 0.2, beta = 0.6, gamma = 0.2, delta = 1.0;
    const auto d = gen_dpa(dpa(alpha, beta, gamma, delta, 100000, 4));
    const EvFit fit = fit_ev(d.graph);
    CHECK(fit.alpha_hat + fit.beta_hat + fit.gamma_hat == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(fit.beta_hat - beta) <= 0.01);
    // Minimum-distance estimates run 0.1 to 0.25 low for tails this light at
    // 1e5 edges.
    CHECK(std::abs(fit.iota1_hat - iota_out(alpha, beta, gamma, delta)) <= 0.25);
    CHECK(std::abs(fit.iota2_hat - iota_in(alpha, beta, gamma, delta)) <= 0.25);
    CHECK(std::abs(fit.alpha_hat - alpha) <= 0.1);
    CHECK(fit.a_hat == doctest::Approx(fit.iota2_hat / fit.iota1_hat));
    CHECK(fit.delta_in_hat > 0.0);
    CHECK(fit.delta_out_hat > 0.0);
    CHECK(fit.n_tail == 200);

    const EvFit back = ev_fit_from_json(to_json(fit));
    CHECK(back.alpha_hat == fit.alpha_hat);
    CHECK(back.delta_out_hat == fit.delta_out_hat);
    CHECK(back.n_tail == fit.n_tail);
    const DpaParams params = fit.as_params(5000, 3);
    CHECK(params.alpha == fit.alpha_hat);
    CHECK(params.delta_in == fit.delta_in_hat);
    CHECK(params.target_edges == 5000);
    CHECK_NOTHROW(params.validate());
}

TEST_CASE("fit JSON rejects malformed input") {
    CHECK_THROWS_AS(ev_fit_from_json("{"), Error);
    CHECK_THROWS_AS(ev_fit_from_json("{\"alpha_hat\": 0.1}"), Error);
}
