#include "didpr/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "didpr/assortativity.hpp"
#include "didpr/error.hpp"
#include "didpr/eta_solver.hpp"
#include "didpr/fit_ev.hpp"
#include "didpr/generators.hpp"
#include "didpr/graph.hpp"
#include "didpr/rewiring.hpp"
#include "didpr/scenario_gains.hpp"

namespace didpr::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Unattainable targets or conditioning; reported with exit code 2.
class Unattainable : public Error {
public:
    using Error::Error;
};

std::uint64_t parse_seed(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(std::string("bad seed in ") + what + ": '" + text + "'");
    }
}

double parse_number(const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size())
            throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error("bad number '" + text + "'");
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, sep))
        parts.push_back(part);
    return parts;
}

AssortProfile parse_targets(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 4)
        throw Error("targets need four comma-separated values r11,r12,r21,r22");
    AssortProfile p;
    for (std::size_t i = 0; i < 4; ++i)
        p.r[i] = parse_number(parts[i]);
    return p;
}

std::vector<TypePair> parse_order(const std::string& text) {
    std::vector<TypePair> order;
    for (const auto& label : split(text, ','))
        order.push_back(type_pair_from_label(label));
    return order;
}

// "r11=0.5" (singleton) or "r11=-0.2:0.3" (interval).
IntervalConstraint parse_condition(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw Error("condition '" + text + "' should look like r11=0.5 or r11=-0.2:0.3");
    IntervalConstraint iv{type_pair_from_label(text.substr(0, eq)), 0.0, 0.0};
    const std::string range = text.substr(eq + 1);
    const auto colon = range.find(':');
    if (colon == std::string::npos) {
        iv.lower = iv.upper = parse_number(range);
    } else {
        iv.lower = parse_number(range.substr(0, colon));
        iv.upper = parse_number(range.substr(colon + 1));
    }
    return iv;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json profile_json(const AssortProfile& p) {
    json j;
    for (auto t : kAllTypePairs)
        j[t.label()] = number_or_null(p[t]);
    return j;
}

// Path for replicate `rep`: unchanged for a single run, otherwise "_<rep>"
// goes before the extension.
std::string replicate_path(const std::string& path, std::size_t rep, std::size_t reps) {
    if (reps <= 1)
        return path;
    const fs::path p(path);
    return (p.parent_path() / (p.stem().string() + "_" + std::to_string(rep) + p.extension().string())).string();
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t rep, std::size_t reps) {
    return reps <= 1 ? seed : stream_seed(seed, rep);
}

// Runs task(0..count-1) on up to `jobs` threads; rethrows the first failure.
void run_parallel(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task) {
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i)
            task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    for (auto& w : workers)
        w.join();
    if (failure)
        std::rethrow_exception(failure);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f)
        throw Error("cannot open " + path + " for writing");
    return f;
}

// Writes to `path`, or to `fallback` when path is "-".
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
    if (path == "-") {
        body(fallback);
        return;
    }
    auto f = open_out(path);
    body(f);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Config files

std::string option_key(const std::string& long_name) {
    std::string key = long_name;
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

std::string option_flag(const std::string& key) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    return "--" + name;
}

std::string token_value(const json& v, const std::string& key) {
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_boolean())
        return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer() || v.is_number_unsigned())
        return v.dump();
    if (v.is_number_float()) {
        std::ostringstream ss;
        ss.precision(17);
        ss << v.get<double>();
        return ss.str();
    }
    if (v.is_array()) {
        std::string joined;
        for (const auto& item : v) {
            if (!joined.empty())
                joined += ',';
            joined += token_value(item, key);
        }
        return joined;
    }
    throw Error("config key '" + key + "' has an unsupported value");
}

// Option tokens for every key of a JSON config; unknown keys are rejected.
std::vector<std::string> config_tokens(const std::string& path, CLI::App& sub) {
    json j;
    try {
        j = json::parse(slurp(path));
    } catch (const json::exception& e) {
        throw Error("config " + path + ": " + e.what());
    }
    if (!j.is_object())
        throw Error("config " + path + " must hold a JSON object");
    std::vector<std::string> tokens;
    for (const auto& [key, value] : j.items()) {
        const std::string flag = option_flag(key);
        const CLI::Option* opt = sub.get_option_no_throw(flag);
        if (opt == nullptr || key == "config")
            throw Error("unknown config key '" + key + "' for " + sub.get_name());
        if (value.is_array() && opt->get_expected_max() > 1) {
            for (const auto& item : value)
                tokens.push_back(flag + "=" + token_value(item, key));
        } else {
            tokens.push_back(flag + "=" + token_value(value, key));
        }
    }
    return tokens;
}

json typed(const std::string& text) {
    if (text == "true")
        return true;
    if (text == "false")
        return false;
    try {
        std::size_t used = 0;
        const long long i = std::stoll(text, &used);
        if (used == text.size())
            return i;
    } catch (const std::exception&) {
    }
    try {
        std::size_t used = 0;
        const double d = std::stod(text, &used);
        if (used == text.size())
            return d;
    } catch (const std::exception&) {
    }
    return text;
}

// Every option's effective value, keyed for --config.
json effective_config(const CLI::App& sub) {
    json j = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty())
            continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help" || name == "config")
            continue;
        const std::string key = option_key(name);
        if (opt->get_type_size() == 0) {
            j[key] = opt->count() > 0 && opt->as<bool>();
        } else if (opt->count() > 0) {
            const auto& results = opt->results();
            if (opt->get_expected_max() > 1) {
                json arr = json::array();
                for (const auto& r : results)
                    arr.push_back(typed(r));
                j[key] = arr;
            } else {
                j[key] = typed(results.back());
            }
        } else if (!opt->get_default_str().empty()) {
            j[key] = typed(opt->get_default_str());
        }
    }
    return j;
}

void write_config(const std::string& path, json config) {
    auto f = open_out(path);
    f << config.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Commands

struct Common {
    std::optional<std::uint64_t> seed;
    std::size_t replicates = 1;
    std::size_t jobs = 1;

    std::uint64_t resolved_seed() const {
        if (seed)
            return *seed;
        if (const char* env = std::getenv("DIDPR_SEED"))
            return parse_seed(env, "DIDPR_SEED");
        return 1;
    }
};

void add_seed(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Random seed (falls back to DIDPR_SEED, then 1)");
}

void add_replicates(CLI::App* sub, Common& c) {
    sub->add_option("--replicates", c.replicates, "Independent replicate runs")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", c.jobs, "Worker threads for replicates")->check(CLI::PositiveNumber);
}

struct GenerateArgs {
    std::string model;
    std::size_t n = 100;
    double p = 0.1;
    DpaParams dpa;
    std::string out = "graph.tsv";
    Common common;
};

json graph_summary(const DirectedGraph& g) {
    json j = {{"nodes", g.num_nodes()}, {"edges", g.num_edges()}};
    const AssortProfile r = g.num_edges() > 0
                                ? assortativity_from_edges(g, true)
                                : AssortProfile{{NAN, NAN, NAN, NAN}};
    for (auto t : kAllTypePairs)
        j[t.label()] = number_or_null(r[t]);
    return j;
}

void cmd_generate(const GenerateArgs& a, const CLI::App& sub, std::ostream& out) {
    const std::uint64_t seed = a.common.resolved_seed();
    const std::size_t reps = a.common.replicates;
    std::vector<json> summaries(reps);
    run_parallel(reps, a.common.jobs, [&](std::size_t rep) {
        const std::string path = replicate_path(a.out, rep, reps);
        const std::uint64_t s = replicate_seed(seed, rep, reps);
        DirectedGraph g;
        if (a.model == "er") {
            g = gen_er(a.n, a.p, s);
        } else {
            DpaParams params = a.dpa;
            params.seed = s;
            DpaGraph d = gen_dpa(params);
            auto f = open_out(path + ".scenarios");
            write_scenarios(d.scenarios, f);
            g = std::move(d.graph);
        }
        write_edge_list_file(g, path);
        summaries[rep] = graph_summary(g);
        summaries[rep]["path"] = path;
    });
    json config = effective_config(sub);
    config["seed"] = seed;
    write_config(a.out + ".config.json", config);
    for (const auto& s : summaries)
        out << s.dump() << '\n';
}

struct AssortArgs {
    std::string graph;
};

void cmd_assort(const AssortArgs& a, std::ostream& out) {
    out << graph_summary(read_edge_list_file(a.graph)).dump(2) << '\n';
}

struct BoundsArgs {
    std::vector<std::string> graphs;
    std::string order = "r11,r12,r21,r22";
    std::vector<std::string> conditions;
    std::string sweep;
    std::string out = "-";
};

void cmd_bounds(const BoundsArgs& a, const CLI::App& sub, std::ostream& out) {
    std::vector<IntervalConstraint> fixed;
    for (const auto& c : a.conditions)
        fixed.push_back(parse_condition(c));
    const std::vector<TypePair> order = parse_order(a.order);

    std::optional<TypePair> swept;
    std::vector<double> values;
    if (!a.sweep.empty()) {
        const auto eq = a.sweep.find('=');
        if (eq == std::string::npos)
            throw Error("sweep should look like r11=-0.9,0,0.9");
        swept = type_pair_from_label(a.sweep.substr(0, eq));
        for (const auto& v : split(a.sweep.substr(eq + 1), ','))
            values.push_back(parse_number(v));
    }

    std::ostringstream rows;
    for (const auto& path : a.graphs) {
        EtaProblem p = EtaProblem::from_graph(read_edge_list_file(path));
        p.intervals = fixed;
        try {
            if (swept) {
                std::vector<TypePair> rest;
                for (auto t : order)
                    if (t != *swept)
                        rest.push_back(t);
                for (double v : values) {
                    EtaProblem q = p;
                    q.intervals.push_back({*swept, v, v});
                    write_bounds_csv_rows(rows, swept->label(), v, coefficient_bounds(q, rest));
                }
            } else {
                std::string label = "none";
                std::optional<double> value;
                if (fixed.size() == 1 && fixed[0].lower == fixed[0].upper) {
                    label = fixed[0].pair.label();
                    value = fixed[0].lower;
                } else if (!fixed.empty()) {
                    label.clear();
                    for (const auto& c : a.conditions)
                        label += (label.empty() ? "" : ";") + c;
                }
                write_bounds_csv_rows(rows, label, value, coefficient_bounds(p, order));
            }
        } catch (const UnattainableError& e) {
            throw Unattainable(path + ": " + e.what());
        }
    }
    emit(a.out, out, [&](std::ostream& o) {
        write_bounds_csv_header(o);
        o << rows.str();
    });
    if (a.out != "-")
        write_config(a.out + ".config.json", effective_config(sub));
}

EtaShape parse_shape(const std::string& s) {
    if (s == "maxent")
        return EtaShape::MaxEntropy;
    if (s == "share")
        return EtaShape::IndependentShare;
    if (s == "vertex")
        return EtaShape::Vertex;
    throw Error("unknown eta shape '" + s + "'");
}

// Solves eta for `targets`; on failure reports the unconditional bounds.
EdgeMixMatrix target_eta_or_guidance(const EtaProblem& base, const AssortProfile& targets, const std::string& shape) {
    EtaProblem p = base;
    p.targets = targets;
    EtaSolveOptions options;
    options.shape = parse_shape(shape);
    if (auto eta = solve_target_eta(p, options))
        return std::move(*eta);
    std::ostringstream msg;
    msg << "targets unattainable for this degree-pair distribution; unconditional bounds:";
    const AssortBounds b = coefficient_bounds(base);
    for (auto t : kAllTypePairs)
        msg << ' ' << t.label() << " [" << b[t]->lower << ", " << b[t]->upper << "]";
    throw Unattainable(msg.str());
}

const std::vector<std::string> kShapes{"maxent", "share", "vertex"};

struct SolveEtaArgs {
    std::string graph;
    std::string targets;
    std::string shape = "maxent";
    std::string out = "eta.csv";
};

void cmd_solve_eta(const SolveEtaArgs& a, const CLI::App& sub, std::ostream& out) {
    const EtaProblem p = EtaProblem::from_graph(read_edge_list_file(a.graph));
    const EdgeMixMatrix eta = target_eta_or_guidance(p, parse_targets(a.targets), a.shape);
    emit(a.out, out, [&](std::ostream& o) { write_edge_mix_csv(eta, o); });
    if (a.out != "-")
        write_config(a.out + ".config.json", effective_config(sub));
}

struct RewireArgs {
    std::string graph;
    std::string targets;
    std::string shape = "maxent";
    RewiringConfig rc;
    std::string out_dir = "rewire_out";
    Common common;
};

void verify_degrees(const DirectedGraph& before, const DirectedGraph& after) {
    if (sorted_degree_sequences(before) != sorted_degree_sequences(after) ||
        degree_pair_dist(before) != degree_pair_dist(after) || !after.degrees_consistent())
        throw Error("rewired graph changed the degree sequences");
}

void cmd_rewire(const RewireArgs& a, const CLI::App& sub, std::ostream& out) {
    const DirectedGraph g = read_edge_list_file(a.graph);
    const EtaProblem p = EtaProblem::from_graph(g);
    const EdgeMixMatrix eta = target_eta_or_guidance(p, parse_targets(a.targets), a.shape);

    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    {
        auto f = open_out((dir / "eta.csv").string());
        write_edge_mix_csv(eta, f);
    }
    const std::uint64_t seed = a.common.resolved_seed();
    const std::size_t reps = a.common.replicates;
    std::vector<json> summaries(reps);
    run_parallel(reps, a.common.jobs, [&](std::size_t rep) {
        RewiringConfig rc = a.rc;
        rc.seed = replicate_seed(seed, rep, reps);
        const RewireResult res = rewire(g, eta, rc);
        verify_degrees(g, res.graph);
        auto trace = open_out(replicate_path((dir / "trace.csv").string(), rep, reps));
        write_trace_csv(res.trace, trace);
        write_edge_list_file(res.graph, replicate_path((dir / "rewired.tsv").string(), rep, reps));
        summaries[rep] = {{"replicate", rep},
                          {"steps", res.steps},
                          {"accepted", res.accepted},
                          {"stopped_early", res.trace.stopped_early},
                          {"final", profile_json(res.trace.checkpoints.back().profile)}};
    });
    json config = effective_config(sub);
    config["seed"] = seed;
    write_config((dir / "config.json").string(), config);
    for (const auto& s : summaries)
        out << s.dump() << '\n';
}

struct FitArgs {
    std::string graph;
    EvFitOptions options;
    std::string out;
    Common common;
};

void cmd_fit(const FitArgs& a, const CLI::App& sub, std::ostream& out) {
    EvFitOptions options = a.options;
    options.seed = a.common.resolved_seed();
    const std::string text = to_json(fit_ev(read_edge_list_file(a.graph), options));
    out << text << '\n';
    if (!a.out.empty()) {
        auto f = open_out(a.out);
        f << text << '\n';
        json config = effective_config(sub);
        config["seed"] = options.seed;
        write_config(a.out + ".config.json", config);
    }
}

struct GainsArgs {
    DpaParams dpa;
    std::string targets = "0.1,0.15,0.1,0.15";
    std::string shape = "maxent";
    RewiringConfig rc;
    std::string out = "-";
    Common common;
};

void cmd_scenario_gains(const GainsArgs& a, const CLI::App& sub, std::ostream& out) {
    const AssortProfile targets = parse_targets(a.targets);
    const std::uint64_t seed = a.common.resolved_seed();
    const std::size_t reps = a.common.replicates;
    std::vector<std::string> blocks(reps);
    run_parallel(reps, a.common.jobs, [&](std::size_t rep) {
        DpaParams params = a.dpa;
        params.seed = stream_seed(replicate_seed(seed, rep, reps), 0);
        const DpaGraph d = gen_dpa(params);
        const EdgeMixMatrix eta = target_eta_or_guidance(EtaProblem::from_graph(d.graph), targets, a.shape);
        RewiringConfig rc = a.rc;
        rc.seed = stream_seed(replicate_seed(seed, rep, reps), 1);
        const ScenarioGains gains = scenario_gains(d, eta, rc);
        std::ostringstream ss;
        ss.precision(12);
        for (std::size_t k = 0; k < kNumBuckets; ++k) {
            ss << rep << ',' << bucket_label(static_cast<ScenarioBucket>(k)) << ',' << gains.accepted[k];
            for (double v : gains.increase[k].r)
                ss << ',' << v;
            ss << '\n';
        }
        ss << rep << ",total," << gains.run.accepted;
        for (std::size_t i = 0; i < 4; ++i)
            ss << ',' << gains.final.r[i] - gains.initial.r[i];
        ss << '\n';
        blocks[rep] = ss.str();
    });
    emit(a.out, out, [&](std::ostream& o) {
        o << "replicate,bucket,accepted,r11,r12,r21,r22\n";
        for (const auto& b : blocks)
            o << b;
    });
    if (a.out != "-") {
        json config = effective_config(sub);
        config["seed"] = seed;
        write_config(a.out + ".config.json", config);
    }
}

struct AggregateArgs {
    std::vector<std::string> traces;
    std::string out = "-";
};

void cmd_aggregate(const AggregateArgs& a, const CLI::App& sub, std::ostream& out) {
    // step -> (count, sums of r11..r22 and acc_rate)
    std::map<std::size_t, std::pair<std::size_t, std::array<double, 5>>> by_step;
    for (const auto& path : a.traces) {
        std::ifstream f(path);
        if (!f)
            throw Error("cannot open " + path);
        std::string line;
        std::getline(f, line);
        if (line != "step,r11,r12,r21,r22,acc_rate")
            throw Error(path + ": not a trace CSV");
        std::size_t lineno = 1;
        while (std::getline(f, line)) {
            ++lineno;
            if (line.empty())
                continue;
            const auto fields = split(line, ',');
            if (fields.size() != 6)
                throw ParseError(lineno, path + ": expected 6 fields");
            auto& [count, sums] = by_step[static_cast<std::size_t>(parse_seed(fields[0], "trace step"))];
            ++count;
            for (std::size_t i = 0; i < 5; ++i)
                sums[i] += parse_number(fields[i + 1]);
        }
    }
    emit(a.out, out, [&](std::ostream& o) {
        o.precision(10);
        o << "step,n,r11,r12,r21,r22,acc_rate\n";
        for (const auto& [step, entry] : by_step) {
            o << step << ',' << entry.first;
            for (double s : entry.second)
                o << ',' << s / static_cast<double>(entry.first);
            o << '\n';
        }
    });
    if (a.out != "-")
        write_config(a.out + ".config.json", effective_config(sub));
}

void add_dpa_options(CLI::App* sub, DpaParams& d) {
    sub->add_option("--alpha", d.alpha, "Probability of a new source node");
    sub->add_option("--beta", d.beta, "Probability of an edge between existing nodes");
    sub->add_option("--gamma", d.gamma, "Probability of a new target node");
    sub->add_option("--delta-in", d.delta_in, "In-degree offset");
    sub->add_option("--delta-out", d.delta_out, "Out-degree offset");
    sub->add_option("--edges", d.target_edges, "Edges added after the seed self-loop");
}

void add_rewiring_options(CLI::App* sub, RewiringConfig& rc) {
    sub->add_option("--steps", rc.max_steps, "Maximum rewiring steps")->check(CLI::PositiveNumber);
    sub->add_option("--checkpoint-every", rc.checkpoint_every, "Steps between trace rows")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tolerance", rc.tolerance, "Per-coefficient early-stop tolerance");
    sub->add_flag("--stop-early", rc.stop_early, "Stop once every coefficient is within tolerance");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Directed degree-preserving rewiring toward target assortativity"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    std::string config_path;
    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON file of option values; explicit flags win");
    };

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate an ER or DPA graph");
    generate->add_option("model,--model", gen.model, "er or dpa")->required()->check(CLI::IsMember({"er", "dpa"}));
    generate->add_option("--n", gen.n, "ER node count");
    generate->add_option("--p", gen.p, "ER edge probability");
    add_dpa_options(generate, gen.dpa);
    generate->add_option("--out", gen.out, "Edge-list path");
    add_seed(generate, gen.common);
    add_replicates(generate, gen.common);
    add_config(generate);

    AssortArgs assort;
    auto* assort_cmd = app.add_subcommand("assort", "Print the four assortativity coefficients");
    assort_cmd->add_option("graph,--graph", assort.graph, "Edge-list path")->required();
    add_config(assort_cmd);

    BoundsArgs bounds;
    auto* bounds_cmd = app.add_subcommand("bounds", "Sequential conditional bounds");
    bounds_cmd->add_option("graph,--graph", bounds.graphs, "Edge-list paths")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    bounds_cmd->add_option("--order", bounds.order, "Visiting order of type pairs");
    bounds_cmd->add_option("--condition", bounds.conditions, "Interval such as r11=0.5 or r11=-0.2:0.3")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    bounds_cmd->add_option("--sweep", bounds.sweep, "Singleton conditioning sweep, e.g. r11=-0.9,0,0.9");
    bounds_cmd->add_option("--out", bounds.out, "CSV path or - for stdout");
    add_config(bounds_cmd);

    SolveEtaArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve-eta", "Solve for eta with target coefficients");
    solve_cmd->add_option("graph,--graph", solve_args.graph, "Edge-list path")->required();
    solve_cmd->add_option("--targets", solve_args.targets, "r11,r12,r21,r22")->required();
    solve_cmd->add_option("--shape", solve_args.shape, "maxent, share or vertex")->check(CLI::IsMember(kShapes));
    solve_cmd->add_option("--out", solve_args.out, "CSV path or - for stdout");
    add_config(solve_cmd);

    RewireArgs rewire_args;
    auto* rewire_cmd = app.add_subcommand("rewire", "Rewire a graph toward target coefficients");
    rewire_cmd->add_option("graph,--graph", rewire_args.graph, "Edge-list path")->required();
    rewire_cmd->add_option("--targets", rewire_args.targets, "r11,r12,r21,r22")->required();
    rewire_cmd->add_option("--shape", rewire_args.shape, "maxent, share or vertex")->check(CLI::IsMember(kShapes));
    add_rewiring_options(rewire_cmd, rewire_args.rc);
    rewire_cmd->add_option("--out-dir", rewire_args.out_dir, "Output directory");
    add_seed(rewire_cmd, rewire_args.common);
    add_replicates(rewire_cmd, rewire_args.common);
    add_config(rewire_cmd);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Extreme-value fit of the DPA model");
    fit_cmd->add_option("graph,--graph", fit.graph, "Edge-list path")->required();
    fit_cmd->add_option("--n-tail", fit.options.n_tail, "Tail sample size for the angle fit");
    fit_cmd->add_option("--grid", fit.options.grid_points, "Alpha grid points");
    fit_cmd->add_option("--sims", fit.options.sims_per_point, "Simulations per grid point");
    fit_cmd->add_option("--out", fit.out, "Also write the JSON here");
    add_seed(fit_cmd, fit.common);
    add_config(fit_cmd);

    GainsArgs gains;
    auto* gains_cmd = app.add_subcommand("scenario-gains", "Assortativity change by scenario pair");
    add_dpa_options(gains_cmd, gains.dpa);
    gains_cmd->add_option("--targets", gains.targets, "r11,r12,r21,r22");
    gains_cmd->add_option("--shape", gains.shape, "maxent, share or vertex")->check(CLI::IsMember(kShapes));
    add_rewiring_options(gains_cmd, gains.rc);
    gains_cmd->add_option("--out", gains.out, "CSV path or - for stdout");
    add_seed(gains_cmd, gains.common);
    add_replicates(gains_cmd, gains.common);
    add_config(gains_cmd);

    AggregateArgs agg;
    auto* agg_cmd = app.add_subcommand("aggregate", "Average trace CSVs step by step");
    agg_cmd->add_option("traces,--traces", agg.traces, "Trace CSV paths")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    agg_cmd->add_option("--out", agg.out, "CSV path or - for stdout");
    add_config(agg_cmd);

    try {
        // Config values go first so explicit flags, parsed later, win.
        std::vector<std::string> tokens = args;
        if (!tokens.empty()) {
            if (CLI::App* sub = app.get_subcommand_no_throw(tokens[0])) {
                for (std::size_t i = 1; i < tokens.size(); ++i) {
                    std::string path;
                    std::size_t erase = 0;
                    if (tokens[i] == "--config" && i + 1 < tokens.size()) {
                        path = tokens[i + 1];
                        erase = 2;
                    } else if (tokens[i].rfind("--config=", 0) == 0) {
                        path = tokens[i].substr(9);
                        erase = 1;
                    } else {
                        continue;
                    }
                    tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                 tokens.begin() + static_cast<std::ptrdiff_t>(i + erase));
                    const auto extra = config_tokens(path, *sub);
                    tokens.insert(tokens.begin() + 1, extra.begin(), extra.end());
                    break;
                }
            }
        }
        // CLI11 consumes arguments from the back.
        std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            return app.exit(e, out, err);
        }

        if (generate->parsed())
            cmd_generate(gen, *generate, out);
        else if (assort_cmd->parsed())
            cmd_assort(assort, out);
        else if (bounds_cmd->parsed())
            cmd_bounds(bounds, *bounds_cmd, out);
        else if (solve_cmd->parsed())
            cmd_solve_eta(solve_args, *solve_cmd, out);
        else if (rewire_cmd->parsed())
            cmd_rewire(rewire_args, *rewire_cmd, out);
        else if (fit_cmd->parsed())
            cmd_fit(fit, *fit_cmd, out);
        else if (gains_cmd->parsed())
            cmd_scenario_gains(gains, *gains_cmd, out);
        else if (agg_cmd->parsed())
            cmd_aggregate(agg, *agg_cmd, out);
        return kExitOk;
    } catch (const Unattainable& e) {
        err << "error: " << e.what() << '\n';
        return kExitUnattainable;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace didpr::cli
