// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails. Pass criterion numbers to run a
// subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "didpr/assortativity.hpp"
#include "didpr/eta_solver.hpp"
#include "didpr/fit_ev.hpp"
#include "didpr/generators.hpp"
#include "didpr/lp.hpp"
#include "didpr/rewiring.hpp"
#include "didpr/scenario_gains.hpp"
#include "support/lp_oracle.hpp"
#include "support/random_lp.hpp"

using namespace didpr;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream ss;
    ss.precision(precision);
    ss << v;
    return ss.str();
}

std::string profile_str(const AssortProfile& p) {
    return "(" + fmt(p.r[0]) + ", " + fmt(p.r[1]) + ", " + fmt(p.r[2]) + ", " + fmt(p.r[3]) + ")";
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

EdgeMixMatrix eta_for(const DirectedGraph& g, const AssortProfile& targets) {
    EtaProblem p = EtaProblem::from_graph(g);
    p.targets = targets;
    auto eta = solve_target_eta(p);
    if (!eta)
        throw Error("targets " + profile_str(targets) + " unattainable");
    return std::move(*eta);
}

const AssortProfile kErTargets{{0.6, 0.5, -0.4, -0.3}};
const AssortProfile kDpaTargets{{0.1, 0.15, 0.1, 0.15}};

Verdict degree_preservation() {
    const auto start = Clock::now();
    int exact = 0;
    std::size_t min_steps = SIZE_MAX;
    for (std::uint64_t run = 0; run < 100; ++run) {
        DirectedGraph g;
        AssortProfile targets;
        if (run % 2 == 0) {
            g = gen_er(200, 0.05, stream_seed(101, run));
            targets = AssortProfile{{0.3, 0.2, -0.2, -0.1}};
        } else {
            g = gen_dpa(dpa(0.3, 0.4, 0.3, 1.0, 2000, stream_seed(102, run))).graph;
            targets = kDpaTargets;
        }
        RewiringConfig cfg;
        cfg.max_steps = 10000;
        cfg.seed = stream_seed(103, run);
        const RewireResult res = rewire(g, eta_for(g, targets), cfg);
        min_steps = std::min(min_steps, res.steps);
        exact += sorted_degree_sequences(res.graph) == sorted_degree_sequences(g) &&
                 degree_pair_dist(res.graph) == degree_pair_dist(g) && res.graph.degrees_consistent();
    }
    const double secs = seconds_since(start);
    return {exact == 100 && min_steps >= 10000 && secs < 30.0,
            std::to_string(exact) + "/100 runs identical, >= " + std::to_string(min_steps) + " steps each, " +
                fmt(secs, 3) + " s"};
}

Verdict er_neutrality() {
    AssortProfile mean_abs{};
    double worst = 0.0;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const auto r = assortativity_of_graph(gen_er(500, 0.1, stream_seed(201, rep)));
        for (std::size_t i = 0; i < 4; ++i) {
            mean_abs.r[i] += std::abs(r.r[i]) / 20.0;
            worst = std::max(worst, std::abs(r.r[i]));
        }
    }
    const double mean_max = *std::max_element(mean_abs.r.begin(), mean_abs.r.end());
    return {mean_max < 0.05 && worst < 0.1,
            "mean |r| " + profile_str(mean_abs) + ", largest single |r| " + fmt(worst)};
}

Verdict er_convergence() {
    const auto start = Clock::now();
    AssortProfile mean_err{};
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        const DirectedGraph g = gen_er(500, 0.1, stream_seed(301, rep));
        RewiringConfig cfg;
        cfg.max_steps = 200000;
        cfg.checkpoint_every = 10000;
        cfg.seed = stream_seed(302, rep);
        const auto res = rewire(g, eta_for(g, kErTargets), cfg);
        const auto& last = res.trace.checkpoints.back().profile;
        for (std::size_t i = 0; i < 4; ++i)
            mean_err.r[i] += std::abs(last.r[i] - kErTargets.r[i]) / 10.0;
    }
    const double secs = seconds_since(start);
    const double worst = *std::max_element(mean_err.r.begin(), mean_err.r.end());
    return {worst <= 0.05 && secs < 120.0, "mean final |r - r*| " + profile_str(mean_err) + ", " + fmt(secs, 3) + " s"};
}

Verdict er_bounds() {
    const DirectedGraph g = gen_er(300, 0.1, 401);
    const EtaProblem base = EtaProblem::from_graph(g);
    const std::vector<TypePair> rest{kOutIn, kInOut, kInIn};
    auto bounds_at = [&](double r11) {
        EtaProblem p = base;
        p.intervals.push_back({kOutOut, r11, r11});
        return coefficient_bounds(p, rest);
    };
    bool wide = true;
    std::string detail = "r22 bounds:";
    for (double r11 : {-0.5, 0.0, 0.5}) {
        const auto b = bounds_at(r11);
        wide = wide && b[kInIn]->lower <= -0.9 && b[kInIn]->upper >= 0.9;
        detail += " [" + fmt(b[kInIn]->lower) + ", " + fmt(b[kInIn]->upper) + "]";
    }
    const auto mid = bounds_at(0.0);
    const auto edge = bounds_at(0.9);
    const double w0 = mid[kOutIn]->upper - mid[kOutIn]->lower;
    const double w9 = edge[kOutIn]->upper - edge[kOutIn]->lower;
    return {wide && w9 < w0, detail + "; r12 width " + fmt(w0) + " at r11=0, " + fmt(w9) + " at r11=0.9"};
}

Verdict eta_reconstruction() {
    Rng rng(501);
    int feasible = 0, checked_infeasible = 0, bad = 0;
    double worst_r = 0.0, worst_m = 0.0;
    auto check = [&](const EtaProblem& p, const EdgeMixMatrix& eta) {
        ++feasible;
        const double err = assortativity(eta).max_abs_diff(*p.targets);
        const auto rows = eta.row_sums();
        const auto cols = eta.col_sums();
        double m = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i)
            m = std::max(m, std::abs(rows[i] - p.source_mass[i]));
        for (std::size_t j = 0; j < cols.size(); ++j)
            m = std::max(m, std::abs(cols[j] - p.target_mass[j]));
        worst_r = std::max(worst_r, err);
        worst_m = std::max(worst_m, m);
        bad += !(err <= 1e-4 && m <= 1e-7);
    };
    for (std::uint64_t inst = 0; inst < 30; ++inst) {
        const DirectedGraph g = inst % 2 == 0
                                    ? gen_er(60 + rng.below(100), 0.05 + 0.1 * rng.uniform01(), stream_seed(502, inst))
                                    : gen_dpa(dpa(0.3, 0.4, 0.3, 1.0, 500 + rng.below(1500), stream_seed(503, inst))).graph;
        EtaProblem p = EtaProblem::from_graph(g);
        const AssortBounds b = coefficient_bounds(p);
        // The observed profile is always attainable.
        p.targets = assortativity_of_graph(g);
        if (auto eta = solve_target_eta(p))
            check(p, *eta);
        else
            ++bad;
        for (int draw = 0; draw < 4; ++draw) {
            AssortProfile t;
            for (auto pair : kAllTypePairs) {
                const double mid = 0.5 * (b[pair]->lower + b[pair]->upper);
                const double half = 0.5 * (b[pair]->upper - b[pair]->lower);
                t[pair] = mid + (2 * rng.uniform01() - 1) * 0.6 * half;
            }
            p.targets = t;
            if (auto eta = solve_target_eta(p)) {
                check(p, *eta);
            } else {
                // Confirm infeasibility with a plain feasibility LP.
                const auto sol = solve_feasibility(assemble_constraints(p));
                bad += sol.status != LpStatus::Infeasible;
                ++checked_infeasible;
            }
        }
    }
    return {bad == 0 && feasible >= 60,
            std::to_string(feasible) + " feasible target sets, worst |r - r*| " + fmt(worst_r, 3) +
                ", worst marginal residual " + fmt(worst_m, 3) + ", " + std::to_string(checked_infeasible) +
                " draws confirmed unattainable"};
}

Verdict lp_oracle() {
    Rng rng(601);
    int agree = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto lp = testing_support::random_small_lp(rng);
        const auto expected = oracle::solve(lp);
        const auto got = solve(lp);
        bool ok = got.status == expected.status;
        if (ok && got.status == LpStatus::Optimal)
            ok = std::abs(got.objective_value - expected.objective) <= 1e-9 * (1.0 + std::abs(expected.objective));
        agree += ok;
    }
    return {agree == 200, std::to_string(agree) + "/200 random LPs agree with vertex enumeration"};
}

Verdict dpa_tail() {
    const double alpha = 0.05, beta = 0.9, gamma = 0.05, delta = 1.0;
    const double i1 = iota_out(alpha, beta, gamma, delta);
    const double i2 = iota_in(alpha, beta, gamma, delta);
    bool ok = true;
    std::string detail = "expected " + fmt(i1) + "/" + fmt(i2) + ", got";
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
        const auto d = gen_dpa(dpa(alpha, beta, gamma, delta, 100000, stream_seed(701, rep)));
        const double e1 = tail_index(d.graph.out_degrees()).iota;
        const double e2 = tail_index(d.graph.in_degrees()).iota;
        ok = ok && std::abs(e1 - i1) <= 0.15 && std::abs(e2 - i2) <= 0.15;
        detail += " " + fmt(e1) + "/" + fmt(e2);
    }
    return {ok, detail};
}

Verdict beta_exactness() {
    const double b = beta_hat(16549, 147063);
    return {std::round(b * 1e4) / 1e4 == 0.8875, "beta_hat = " + fmt(b, 8)};
}

Verdict beta_speed() {
    auto mean_checkpoints = [](double beta, std::size_t& unreached) {
        const double side = (1.0 - beta) / 2.0;
        double total = 0.0;
        for (std::uint64_t rep = 0; rep < 10; ++rep) {
            const auto d = gen_dpa(dpa(side, beta, side, 1.0, 20000, stream_seed(901, rep)));
            const EdgeMixMatrix eta = eta_for(d.graph, kDpaTargets);
            RewiringConfig cfg;
            cfg.max_steps = 500000;
            cfg.checkpoint_every = 1000;
            cfg.tolerance = 0.05;
            cfg.stop_early = true;
            cfg.seed = stream_seed(902, rep);
            const auto res = rewire(d.graph, eta, cfg);
            const auto first = res.trace.first_within(kDpaTargets, cfg.tolerance);
            if (!first)
                ++unreached;
            // Unreached runs count as the full budget.
            total += static_cast<double>(first ? *first : res.trace.checkpoints.size() - 1);
        }
        return total / 10.0;
    };
    std::size_t miss_low = 0, miss_high = 0;
    const double low = mean_checkpoints(0.1, miss_low);
    const double high = mean_checkpoints(0.4, miss_high);
    return {low < high, "mean checkpoints to tolerance: beta=0.1 " + fmt(low) + " (" + std::to_string(miss_low) +
                            " unreached), beta=0.4 " + fmt(high) + " (" + std::to_string(miss_high) + " unreached)"};
}

Verdict scenario_attribution() {
    int wins = 0;
    std::string detail = "alpha-gamma leads all four coefficients in";
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        const auto d = gen_dpa(dpa(0.3, 0.4, 0.3, 1.0, 20000, stream_seed(1001, rep)));
        RewiringConfig cfg;
        // Stop at the targets so the buckets record the drift toward them
        // rather than stationary swap noise.
        cfg.max_steps = 1000000;
        cfg.checkpoint_every = 1000;
        cfg.tolerance = 0.05;
        cfg.stop_early = true;
        cfg.seed = stream_seed(1002, rep);
        const ScenarioGains gains = scenario_gains(d, eta_for(d.graph, kDpaTargets), cfg);
        const auto ag = static_cast<std::size_t>(ScenarioBucket::AlphaGamma);
        bool lead = true;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t b = 0; b < kNumBuckets; ++b)
                if (b != ag && !(gains.increase[ag].r[i] > gains.increase[b].r[i]))
                    lead = false;
        wins += lead;
    }
    return {wins >= 8, detail + " " + std::to_string(wins) + "/10 replicates"};
}

Verdict balance_identity() {
    Rng rng(1101);
    double worst = 0.0;
    for (int draw = 0; draw < 10000; ++draw) {
        // Random eta over a random support; the swap reads four entries.
        const std::size_t rows = 2 + rng.below(4), cols = 2 + rng.below(4);
        EdgeMixMatrix eta;
        for (std::size_t i = 0; i < rows; ++i)
            eta.source_pairs.push_back({static_cast<Degree>(i + 1), static_cast<Degree>(rng.below(3))});
        for (std::size_t j = 0; j < cols; ++j)
            eta.target_pairs.push_back({static_cast<Degree>(rng.below(3)), static_cast<Degree>(j + 1)});
        std::sort(eta.source_pairs.begin(), eta.source_pairs.end());
        std::sort(eta.target_pairs.begin(), eta.target_pairs.end());
        double total = 0.0;
        eta.h.resize(rows * cols);
        for (double& v : eta.h) {
            v = std::exp(-10.0 * rng.uniform01());
            total += v;
        }
        for (double& v : eta.h)
            v /= total;
        const std::size_t i1 = rng.below(rows), i3 = rng.below(rows);
        const std::size_t j2 = rng.below(cols), j4 = rng.below(cols);
        const SwapDegrees d{eta.source_pairs[i1], eta.target_pairs[j2], eta.source_pairs[i3], eta.target_pairs[j4]};
        const double ratio = eta.at(i1, j4) * eta.at(i3, j2) / (eta.at(i1, j2) * eta.at(i3, j4));
        worst = std::max(worst, std::abs(balance_ratio(eta, d) - ratio) / ratio);
    }
    return {worst <= 1e-12, "10000 draws, worst relative deviation " + fmt(worst, 3)};
}

struct Criterion {
    int number;
    const char* name;
    std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks"};
    std::vector<int> only;
    app.add_option("criteria", only, "Criterion numbers to run (default: all)");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "degree preservation", degree_preservation},
        {2, "ER neutrality", er_neutrality},
        {3, "ER target convergence", er_convergence},
        {4, "ER conditional bounds", er_bounds},
        {5, "eta reconstruction", eta_reconstruction},
        {6, "LP oracle equivalence", lp_oracle},
        {7, "DPA tail law", dpa_tail},
        {8, "beta estimate", beta_exactness},
        {9, "beta speed ordering", beta_speed},
        {10, "scenario attribution", scenario_attribution},
        {11, "balance identity", balance_identity},
    };
    const std::set<int> wanted(only.begin(), only.end());
    int failures = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && !wanted.count(c.number))
            continue;
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        failures += !v.pass;
        std::cout << "criterion " << c.number << " " << (v.pass ? "PASS" : "FAIL") << " " << c.name << ": "
                  << v.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
