#pragma once

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ballot/election.hpp"
#include "ballot/election_io.hpp"
#include "ballot/errors.hpp"
#include "ballot/generators.hpp"
#include "ballot/harness.hpp"
#include "ballot/mov_estimators.hpp"
#include "ballot/oracles.hpp"
#include "ballot/plan.hpp"
#include "ballot/rules.hpp"

namespace ballot::cli {

enum ExitCode : int { Ok = 0, Runtime = 1, BadParameter = 2, BadInput = 3 };

namespace detail {

struct Common {
    std::string algorithm = "alg1";
    std::string family = "planted";
    std::size_t m = 2;
    std::size_t k = 20;
    std::uint64_t n = 100;
    std::string sizes = "equal";
    std::optional<double> margin;
    double epsilon = 0.1;
    double delta = 0.1;
    double kappa = 4;
    double gamma = 0;
    std::string adversary = "tilt";
    double scale = 1;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::string in;
    std::string out;
    std::string format;
};

inline void add_instance_flags(CLI::App& sub, Common& c) {
    sub.add_option("--family", c.family, "planted|lb1|lb2|single-peaked|random|unanimous");
    sub.add_option("--m", c.m, "Number of candidates");
    sub.add_option("--k", c.k, "Number of districts");
    sub.add_option("--n", c.n, "District population");
    sub.add_option("--sizes", c.sizes, "equal|capped|heavy");
    sub.add_option("--margin", c.margin, "Planted MOV as a fraction of the population");
    sub.add_option("--adversary", c.adversary, "tilt|random");
}

inline void add_run_flags(CLI::App& sub, Common& c) {
    sub.add_option("--algorithm", c.algorithm,
                   "alg1|generic|alg3|alg4|single-plurality|median-known|median-unknown|noisy-single|noisy-districts|"
                   "mov-add|mov-mult");
    sub.add_option("--epsilon", c.epsilon);
    sub.add_option("--delta", c.delta);
    sub.add_option("--kappa", c.kappa);
    sub.add_option("--gamma", c.gamma, "TV bound of the sampling distribution");
    sub.add_option("--scale", c.scale, "Multiplier on every sample budget");
    sub.add_option("--seed", c.seed);
}

inline void add_io_flags(CLI::App& sub, Common& c) {
    sub.add_option("--in", c.in, "Election file (.json or text)");
    sub.add_option("--out", c.out, "Output file; stdout when absent");
    sub.add_option("--format", c.format, "text|json|csv");
}

inline ExperimentConfig to_config(const Common& c) {
    ExperimentConfig x;
    x.algorithm = parse_algorithm(c.algorithm);
    x.family = c.family;
    x.m = c.m;
    x.k = c.k;
    x.n = c.n;
    x.sizes = parse_size_rule(c.sizes);
    x.margin = c.margin;
    x.epsilon = c.epsilon;
    x.delta = c.delta;
    x.kappa = c.kappa;
    x.gamma = c.gamma;
    x.adversary = parse_adversary(c.adversary);
    x.scale = c.scale;
    x.trials = c.trials;
    x.seed = c.seed;
    x.workers = c.workers;
    if (!c.in.empty()) {
        x.family = "file";
        x.instance = std::make_shared<const Election>(read_election(c.in));
    }
    return x;
}

inline std::string format_or(const Common& c, const std::string& fallback, std::initializer_list<const char*> allowed) {
    const std::string f = c.format.empty() ? fallback : c.format;
    for (const char* a : allowed)
        if (f == a) return f;
    throw ParameterError("unsupported --format '" + f + "'");
}

inline void emit(const Common& c, const std::string& text, std::ostream& out) {
    if (c.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw ParameterError("cannot open '" + c.out + "' for writing");
    f << text;
}

inline std::string indices(const std::vector<Candidate>& cs) {
    std::string s;
    for (std::size_t i = 0; i < cs.size(); ++i) s += (i ? "," : "") + std::to_string(cs[i].index);
    return s;
}

inline nlohmann::json candidates_json(const std::vector<Candidate>& cs) {
    auto j = nlohmann::json::array();
    for (const auto& c : cs) j.push_back(c.index);
    return j;
}

/// key: value lines, or one JSON object.
class Report {
public:
    template <class T>
    void add(const std::string& key, const T& value, const nlohmann::json& as_json) {
        std::ostringstream os;
        os << value;
        lines_.emplace_back(key, os.str());
        json_[key] = as_json;
    }
    template <class T>
    void add(const std::string& key, const T& value) {
        add(key, value, nlohmann::json(value));
    }
    std::string render(const std::string& format) const {
        if (format == "json") return json_.dump(2) + "\n";
        std::string s;
        for (const auto& [k, v] : lines_) s += k + ": " + v + "\n";
        return s;
    }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
    nlohmann::json json_ = nlohmann::json::object();
};

inline void add_ledger(Report& r, const SampleLedger& s) {
    r.add("votes_drawn", s.votes_drawn);
    r.add("districts_drawn", s.districts_drawn);
    r.add("samples", s.total());
}

inline std::string cmd_generate(const Common& c) {
    ExperimentConfig x = to_config(c);
    TieBreak tie;
    const Election e = build_instance(x, tie);
    const std::string fmt = c.format.empty() ? (c.out.empty() ? "text" : (format_for_path(c.out) == ElectionFormat::Json ? "json" : "text"))
                                             : format_or(c, "text", {"text", "json"});
    std::ostringstream os;
    write_election(e, os, fmt == "json" ? ElectionFormat::Json : ElectionFormat::Text);
    return os.str();
}

inline std::string cmd_predict(const Common& c) {
    const std::string fmt = format_or(c, "text", {"text", "json"});
    const ExperimentConfig x = to_config(c);
    if (is_mov_algorithm(x.algorithm)) throw ParameterError("use estimate-mov for MOV estimators");
    const PreparedExperiment p = prepare(x);
    Rng rng(trial_seed(x.seed, 0));
    const auto o = predict_once(x, p, rng);
    Report r;
    r.add("algorithm", std::string(algorithm_name(x.algorithm)));
    r.add("winner", o.winner.index);
    r.add("true_winner", p.winner.index);
    add_ledger(r, o.samples);
    if (o.terminated_at) r.add("terminated_at", *o.terminated_at);
    r.add("fallback_used", o.fallback_used ? "true" : "false", o.fallback_used);
    return r.render(fmt);
}

inline std::string cmd_estimate(const Common& c, const std::string& regime, const std::string& oracle) {
    const std::string fmt = format_or(c, "text", {"text", "json"});
    Common cc = c;
    if (regime == "additive")
        cc.algorithm = "mov-add";
    else if (regime == "multiplicative")
        cc.algorithm = "mov-mult";
    else
        throw ParameterError("unknown regime '" + regime + "'");
    ExperimentConfig x = to_config(cc);
    const PreparedExperiment p = prepare(x);
    Rng rng(trial_seed(x.seed, 0));
    MOVEstimate est;
    if (oracle == "exact") {
        if (x.algorithm != Algorithm::MovMultiplicative) throw ParameterError("--oracle exact needs the multiplicative regime");
        est = estimate_mov_multiplicative(exact_additive_oracle(p.election, p.tie), x.epsilon, x.delta,
                                          p.election.total_population);
    } else if (oracle == "sampling") {
        est = estimate_once(x, p, rng);
    } else {
        throw ParameterError("unknown oracle '" + oracle + "'");
    }
    Report r;
    r.add("regime", regime);
    r.add("estimate", to_string(est.value));
    r.add("estimate_decimal", to_double(est.value));
    r.add("exact_mov", p.mov);
    r.add("within_band", within_band(est, p.mov, p.election.total_population) ? "true" : "false",
          within_band(est, p.mov, p.election.total_population));
    r.add("rounds", est.rounds);
    r.add("exhausted", est.exhausted ? "true" : "false", est.exhausted);
    add_ledger(r, est.samples);
    return r.render(fmt);
}

inline std::string cmd_exact(const Common& c, const std::string& rule_name, const std::string& method) {
    const std::string fmt = format_or(c, "text", {"text", "json"});
    if (c.in.empty()) throw ParameterError("exact needs --in");
    const Election e = read_election(c.in);
    validate(e);
    Rule rule;
    if (rule_name == "plurality")
        rule = Rule::Plurality;
    else if (rule_name == "median")
        rule = Rule::Median;
    else
        throw ParameterError("unknown rule '" + rule_name + "'");
    const auto tie = TieBreak::ascending(e.num_candidates);
    const auto outcome = district_election_winner(e, rule, tie);
    std::string how = method;
    if (how == "auto") how = (rule == Rule::Plurality && e.num_candidates == 2) ? "greedy" : "bruteforce";
    MOVResult mov;
    if (how == "greedy") {
        if (rule != Rule::Plurality) throw RuleInapplicable("greedy MOV is defined for plurality");
        mov = election_mov_greedy_2cand(e, tie);
    } else if (how == "bruteforce") {
        mov = election_mov_bruteforce(e, rule, tie);
    } else {
        throw ParameterError("unknown method '" + method + "'");
    }
    Report r;
    r.add("winner", outcome.winner.index);
    r.add("district_winners", indices(outcome.district_winners), candidates_json(outcome.district_winners));
    r.add("method", how);
    r.add("mov", mov.value);
    r.add("witness", indices(mov.witness), candidates_json(mov.witness));
    return r.render(fmt);
}

inline std::string render_stats(const std::vector<TrialStats>& rows, const std::string& fmt) {
    if (fmt == "json") {
        auto j = nlohmann::json::array();
        for (const auto& s : rows) j.push_back(to_json(s));
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

inline std::string cmd_mc(const Common& c) {
    const std::string fmt = format_or(c, "csv", {"csv", "json"});
    return render_stats({mc_eval(to_config(c))}, fmt);
}

template <class T>
std::vector<T> split_list(const std::string& s, T (*parse)(const std::string&)) {
    std::vector<T> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ','))
        if (!item.empty()) out.push_back(parse(item));
    return out;
}

inline double parse_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParameterError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw ParameterError("not a number: '" + s + "'");
    return v;
}

inline std::string parse_word(const std::string& s) { return s; }

struct SweepLists {
    std::string algorithms;
    std::string epsilons;
    std::string deltas;
    std::string kappas;
    std::string gammas;
    std::string scales;
};

/// Cartesian product in the order algorithm, epsilon, delta, kappa, gamma, scale.
inline std::string cmd_sweep(const Common& c, const SweepLists& l) {
    const std::string fmt = format_or(c, "csv", {"csv", "json"});
    auto words = l.algorithms.empty() ? std::vector<std::string>{c.algorithm} : split_list<std::string>(l.algorithms, parse_word);
    auto list = [&](const std::string& s, double fallback) {
        return s.empty() ? std::vector<double>{fallback} : split_list<double>(s, parse_number);
    };
    const auto eps = list(l.epsilons, c.epsilon);
    const auto dels = list(l.deltas, c.delta);
    const auto kaps = list(l.kappas, c.kappa);
    const auto gams = list(l.gammas, c.gamma);
    const auto scs = list(l.scales, c.scale);

    std::vector<ExperimentConfig> configs;
    const ExperimentConfig base = [&] {
        Common cc = c;
        cc.algorithm = words.empty() ? c.algorithm : words.front();
        return to_config(cc);
    }();
    for (const auto& a : words)
        for (double e : eps)
            for (double d : dels)
                for (double k : kaps)
                    for (double g : gams)
                        for (double s : scs) {
                            ExperimentConfig x = base;
                            x.algorithm = parse_algorithm(a);
                            x.epsilon = e;
                            x.delta = d;
                            x.kappa = k;
                            x.gamma = g;
                            x.scale = s;
                            configs.push_back(std::move(x));
                        }
    return render_stats(sweep(configs), fmt);
}

}  // namespace detail

/// Runs one command line (without the program name). Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sampling-based winner prediction and margin-of-victory estimation for district elections",
                 "ballot-sampler"};
    app.require_subcommand(1);
    detail::Common c;

    auto* gen = app.add_subcommand("generate", "Write a generated election");
    detail::add_instance_flags(*gen, c);
    gen->add_option("--epsilon", c.epsilon, "Default planted margin");
    gen->add_option("--kappa", c.kappa);
    gen->add_option("--seed", c.seed);
    gen->add_option("--out", c.out);
    gen->add_option("--format", c.format, "text|json");

    auto* pred = app.add_subcommand("predict", "Predict the winner once");
    detail::add_instance_flags(*pred, c);
    detail::add_run_flags(*pred, c);
    detail::add_io_flags(*pred, c);

    std::string regime = "additive";
    std::string oracle = "sampling";
    auto* est = app.add_subcommand("estimate-mov", "Estimate the margin of victory once");
    detail::add_instance_flags(*est, c);
    detail::add_run_flags(*est, c);
    detail::add_io_flags(*est, c);
    est->add_option("--regime", regime, "additive|multiplicative");
    est->add_option("--oracle", oracle, "sampling|exact (multiplicative only)");

    std::string rule = "plurality";
    std::string method = "auto";
    auto* exact = app.add_subcommand("exact", "Exact winner and margin of victory");
    detail::add_io_flags(*exact, c);
    exact->add_option("--rule", rule, "plurality|median");
    exact->add_option("--method", method, "auto|greedy|bruteforce");

    auto* mc = app.add_subcommand("mc", "Monte Carlo success rate of one configuration");
    detail::add_instance_flags(*mc, c);
    detail::add_run_flags(*mc, c);
    detail::add_io_flags(*mc, c);
    mc->add_option("--trials", c.trials);
    mc->add_option("--workers", c.workers);

    detail::SweepLists lists;
    auto* sw = app.add_subcommand("sweep", "Monte Carlo over the product of comma-separated lists");
    detail::add_instance_flags(*sw, c);
    detail::add_run_flags(*sw, c);
    detail::add_io_flags(*sw, c);
    sw->add_option("--trials", c.trials);
    sw->add_option("--workers", c.workers);
    sw->add_option("--algorithms", lists.algorithms);
    sw->add_option("--epsilons", lists.epsilons);
    sw->add_option("--deltas", lists.deltas);
    sw->add_option("--kappas", lists.kappas);
    sw->add_option("--gammas", lists.gammas);
    sw->add_option("--scales", lists.scales);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return BadParameter;
    }

    try {
        std::string text;
        if (*gen)
            text = detail::cmd_generate(c);
        else if (*pred)
            text = detail::cmd_predict(c);
        else if (*est)
            text = detail::cmd_estimate(c, regime, oracle);
        else if (*exact)
            text = detail::cmd_exact(c, rule, method);
        else if (*mc)
            text = detail::cmd_mc(c);
        else
            text = detail::cmd_sweep(c, lists);
        detail::emit(c, text, out);
        return Ok;
    } catch (const InvariantViolation& e) {
        err << "invariant violation: " << e.what() << "\n";
        return BadInput;
    } catch (const ballot::ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return BadInput;
    } catch (const NotSinglePeaked& e) {
        err << "not single-peaked: " << e.what() << "\n";
        return BadInput;
    } catch (const IterationCap& e) {
        err << "iteration cap: " << e.what() << "\n";
        return Runtime;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return BadParameter;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Runtime;
    }
}

}  // namespace ballot::cli
