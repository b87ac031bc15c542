#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "didpr/assortativity.hpp"
#include "didpr/error.hpp"
#include "didpr/eta_solver.hpp"
#include "didpr/generators.hpp"

using namespace didpr;

namespace {

// Nodes (2,0), (1,1), (0,2): two source pairs and two target pairs.
DirectedGraph two_by_two() { return DirectedGraph(3, {{0, 1}, {0, 2}, {1, 2}}); }

DirectedGraph mixed_graph(std::uint64_t seed) {
    DpaParams params;
    params.alpha = 0.3;
    params.beta = 0.4;
    params.gamma = 0.3;
    params.target_edges = 600;
    params.seed = seed;
    return gen_dpa(params).graph;
}

// Marginal residual and coefficient error of a returned eta.
void check_eta(const EtaProblem& p, const EdgeMixMatrix& eta, const AssortProfile& targets, double tol) {
    REQUIRE(eta.source_pairs == p.source_pairs);
    REQUIRE(eta.target_pairs == p.target_pairs);
    for (double v : eta.h)
        CHECK(v >= -1e-12);
    const auto rows = eta.row_sums();
    const auto cols = eta.col_sums();
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        worst = std::max(worst, std::abs(rows[i] - p.source_mass[i]));
    for (std::size_t j = 0; j < cols.size(); ++j)
        worst = std::max(worst, std::abs(cols[j] - p.target_mass[j]));
    CHECK(worst <= 1e-7);
    CHECK(assortativity(eta).max_abs_diff(targets) <= tol);
}

}  // namespace

TEST_CASE("problem masses follow the degree-pair distribution") {
    const EtaProblem p = EtaProblem::from_graph(two_by_two());
    CHECK(p.rows() == 2);
    CHECK(p.cols() == 2);
    CHECK(p.num_vars() == 4);
    CHECK(std::accumulate(p.source_mass.begin(), p.source_mass.end(), 0.0) == doctest::Approx(1.0));
    // Source (2,0) carries two of the three edges.
    CHECK(p.source_mass[1] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("constraint assembly row counts") {
    EtaProblem p = EtaProblem::from_graph(two_by_two());
    const LinearProgram plain = assemble_constraints(p);
    CHECK(plain.num_vars == 4);
    CHECK(plain.eq.size() == 4);
    CHECK(plain.ub.empty());
    p.targets = assortativity_of_graph(two_by_two());
    CHECK(assemble_constraints(p).eq.size() == 8);
    p.targets.reset();
    p.intervals.push_back({kOutOut, -0.5, 0.5});
    CHECK(assemble_constraints(p).ub.size() == 2);
}

TEST_CASE("the observed eta satisfies its own constraint system") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const DirectedGraph g = mixed_graph(seed);
        EtaProblem p = EtaProblem::from_graph(g);
        p.targets = assortativity_of_graph(g);
        const EdgeMixMatrix observed = edge_mix_from_graph(g);
        REQUIRE(observed.source_pairs == p.source_pairs);
        REQUIRE(observed.target_pairs == p.target_pairs);
        const auto res = residuals(assemble_constraints(p), observed.h);
        CHECK(res.max_eq <= 1e-12);
        for (auto t : kAllTypePairs) {
            const auto coef = moment_coefficients(p, t);
            const double dot = std::inner_product(coef.begin(), coef.end(), observed.h.begin(), 0.0);
            CHECK(dot == doctest::Approx(degree_product_moment(observed, t)).epsilon(1e-12));
        }
    }
}

TEST_CASE("affine coefficient map") {
    EndDistributions ends;
    ends.mean_q = {2.0, 1.0};
    ends.mean_q_tilde = {2.0, 1.0};
    ends.sigma_q = {0.5, 1.0};
    ends.sigma_q_tilde = {0.5, 1.0};
    CHECK(g_map(kOutOut, 0.0, ends) == doctest::Approx(4.0));
    CHECK(g_map(kOutOut, 1.0, ends) == doctest::Approx(4.25));
    CHECK(g_inverse(kOutOut, 4.25, ends) == doctest::Approx(1.0));
    ends.sigma_q[1] = 0.0;
    CHECK_THROWS_AS(g_map(kInOut, 0.3, ends), Error);

    const DirectedGraph g = mixed_graph(7);
    const EdgeMixMatrix observed = edge_mix_from_graph(g);
    const auto real_ends = end_distributions(observed);
    const auto r = assortativity(observed);
    for (auto t : kAllTypePairs)
        CHECK(std::abs(g_map(t, r[t], real_ends) - degree_product_moment(observed, t)) <= 1e-10);
}

TEST_CASE("own profile as targets is attainable for every shape") {
    const DirectedGraph g = mixed_graph(3);
    EtaProblem p = EtaProblem::from_graph(g);
    p.targets = assortativity_of_graph(g);
    for (auto shape : {EtaShape::MaxEntropy, EtaShape::IndependentShare, EtaShape::Vertex}) {
        EtaSolveOptions options;
        options.shape = shape;
        const auto eta = solve_target_eta(p, options);
        REQUIRE(eta);
        check_eta(p, *eta, *p.targets, 1e-6);
    }
}

TEST_CASE("max-entropy eta is strictly positive and hits the targets") {
    const DirectedGraph g = gen_er(300, 0.1, 5);
    EtaProblem p = EtaProblem::from_graph(g);
    const AssortProfile targets{{0.6, 0.5, -0.4, -0.3}};
    p.targets = targets;
    const auto eta = max_entropy_eta(p);
    REQUIRE(eta);
    for (double v : eta->h)
        CHECK(v > 0.0);
    check_eta(p, *eta, targets, 1e-4);
}

TEST_CASE("large ER targets are attainable") {
    const DirectedGraph g = gen_er(1000, 0.1, 1);
    EtaProblem p = EtaProblem::from_graph(g);
    const AssortProfile targets{{0.6, 0.5, -0.4, -0.3}};
    p.targets = targets;
    const auto eta = solve_target_eta(p);
    REQUIRE(eta);
    check_eta(p, *eta, targets, 1e-4);
}

TEST_CASE("contradictory targets are unattainable") {
    const DirectedGraph g = gen_er(100, 0.08, 2);
    EtaProblem p = EtaProblem::from_graph(g);
    const AssortBounds b = coefficient_bounds(p);
    AssortProfile targets = assortativity_of_graph(g);
    targets[kOutOut] = std::min(1.0, b[kOutOut]->upper + 0.05);
    p.targets = targets;
    for (auto shape : {EtaShape::MaxEntropy, EtaShape::IndependentShare, EtaShape::Vertex}) {
        EtaSolveOptions options;
        options.shape = shape;
        CHECK_FALSE(solve_target_eta(p, options));
    }
}

TEST_CASE("targets on a degenerate end are rejected") {
    // Every source has out-degree 1, so r11 and r12 are undefined.
    const DirectedGraph g(4, {{0, 1}, {1, 2}, {2, 1}, {3, 1}});
    EtaProblem p = EtaProblem::from_graph(g);
    p.targets = AssortProfile{{0.0, 0.0, 0.0, 0.0}};
    CHECK_THROWS_AS(assemble_constraints(p), Error);
}

TEST_CASE("ER bounds on r22 stay wide whatever r11 is pinned to") {
    const DirectedGraph g = gen_er(300, 0.1, 3);
    const EtaProblem base = EtaProblem::from_graph(g);
    const std::vector<TypePair> rest{kOutIn, kInOut, kInIn};
    double width_mid = 0.0, width_edge = 0.0;
    for (double r11 : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        EtaProblem p = base;
        p.intervals.push_back({kOutOut, r11, r11});
        const AssortBounds b = coefficient_bounds(p, rest);
        CHECK(b[kInIn]->lower <= -0.9);
        CHECK(b[kInIn]->upper >= 0.9);
        CHECK_FALSE(b[kOutOut]);
        const double w = b[kOutIn]->upper - b[kOutIn]->lower;
        if (r11 == 0.0)
            width_mid = w;
        if (r11 == 0.9)
            width_edge = w;
    }
    CHECK(width_edge < width_mid);
}

TEST_CASE("pinning a coefficient at its observed value brackets the profile") {
    const DirectedGraph g = mixed_graph(11);
    EtaProblem p = EtaProblem::from_graph(g);
    const AssortProfile observed = assortativity_of_graph(g);
    for (auto t : kAllTypePairs)
        p.intervals.push_back({t, observed[t], observed[t]});
    // Each pair sees the pins of the pairs visited before it.
    const AssortBounds b = coefficient_bounds(p);
    const AssortBounds free = coefficient_bounds(EtaProblem::from_graph(g));
    for (auto t : kAllTypePairs) {
        REQUIRE(b[t]);
        CHECK(b[t]->lower <= observed[t] + 1e-6);
        CHECK(b[t]->upper >= observed[t] - 1e-6);
        CHECK(b[t]->upper - b[t]->lower <= free[t]->upper - free[t]->lower + 1e-9);
    }
    CHECK(b[kInIn]->upper - b[kInIn]->lower < free[kInIn]->upper - free[kInIn]->lower);
}

TEST_CASE("bounds respect their invariants and the visiting order") {
    const DirectedGraph g = mixed_graph(5);
    EtaProblem p = EtaProblem::from_graph(g);
    const AssortProfile observed = assortativity_of_graph(g);
    const AssortBounds free = coefficient_bounds(p);
    for (auto t : kAllTypePairs) {
        REQUIRE(free[t]);
        CHECK(free[t]->lower <= free[t]->upper);
        CHECK(free[t]->lower >= -1.0 - 1e-9);
        CHECK(free[t]->upper <= 1.0 + 1e-9);
        CHECK(free[t]->lower <= observed[t] + 1e-9);
        CHECK(free[t]->upper >= observed[t] - 1e-9);
    }
    // A tight r11 interval narrows later pairs only.
    const double mid = 0.5 * (free[kOutOut]->lower + free[kOutOut]->upper);
    p.intervals.push_back({kOutOut, mid, mid});
    const AssortBounds conditioned = coefficient_bounds(p);
    CHECK(conditioned[kOutOut]->lower == doctest::Approx(free[kOutOut]->lower).epsilon(1e-9));
    for (auto t : {kOutIn, kInOut, kInIn}) {
        CHECK(conditioned[t]->lower >= free[t]->lower - 1e-9);
        CHECK(conditioned[t]->upper <= free[t]->upper + 1e-9);
    }
}

TEST_CASE("unattainable conditioning raises") {
    const DirectedGraph g = mixed_graph(2);
    EtaProblem p = EtaProblem::from_graph(g);
    p.intervals.push_back({kOutOut, 1.5, 1.5});
    CHECK_THROWS_AS(coefficient_bounds(p), UnattainableError);
}

TEST_CASE("bounds CSV layout") {
    AssortBounds b;
    b[kOutOut] = CoefficientBounds{-0.5, 0.25};
    std::ostringstream out;
    write_bounds_csv_header(out);
    write_bounds_csv_rows(out, "none", std::nullopt, b);
    write_bounds_csv_rows(out, "r22", 0.5, b);
    CHECK(out.str() ==
          "conditioned_pair,conditioned_value,pair,lower,upper\n"
          "none,,r11,-0.5,0.25\n"
          "r22,0.5,r11,-0.5,0.25\n");
}
