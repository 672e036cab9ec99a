#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <nlohmann/json.hpp>

#include "ballot/election.hpp"
#include "ballot/errors.hpp"
#include "ballot/generators.hpp"
#include "ballot/mov_estimators.hpp"
#include "ballot/oracles.hpp"
#include "ballot/plan.hpp"
#include "ballot/predictors.hpp"
#include "ballot/rational.hpp"
#include "ballot/rules.hpp"
#include "ballot/sampling.hpp"

namespace ballot {

/// Instance families: planted, lb1, lb2, single-peaked, random, unanimous, or
/// a fixed election supplied by the caller.
struct ExperimentConfig {
    Algorithm algorithm = Algorithm::Alg1;
    std::string family = "planted";
    std::size_t m = 2;
    std::size_t k = 20;
    std::uint64_t n = 100;
    SizeRule sizes = SizeRule::Equal;
    /// MOV fraction planted in generated instances; epsilon when unset.
    std::optional<double> margin;
    double epsilon = 0.1;
    double delta = 0.1;
    double kappa = 4;
    /// TV bound of the sampling distribution (noisy algorithms).
    double gamma = 0;
    Adversary adversary = Adversary::TiltTowardLoser;
    double scale = 1;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::shared_ptr<const Election> instance;
};

struct TrialStats {
    std::size_t trials = 0;
    std::size_t successes = 0;
    std::vector<std::uint64_t> sample_counts;
    std::uint64_t seed = 0;
    ExperimentConfig config;
    std::string error;

    double success_rate() const { return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
    double mean_samples() const {
        if (sample_counts.empty()) return 0;
        long double s = 0;
        for (auto x : sample_counts) s += x;
        return static_cast<double>(s / sample_counts.size());
    }
    std::uint64_t min_samples() const {
        return sample_counts.empty() ? 0 : *std::min_element(sample_counts.begin(), sample_counts.end());
    }
    std::uint64_t max_samples() const {
        return sample_counts.empty() ? 0 : *std::max_element(sample_counts.begin(), sample_counts.end());
    }
    bool operator==(const TrialStats& o) const {
        return trials == o.trials && successes == o.successes && sample_counts == o.sample_counts && seed == o.seed &&
               error == o.error;
    }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of trial i: splitmix64(splitmix64(master) ^ i).
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t i) { return splitmix64(splitmix64(master) ^ i); }

/// Fixed seed for instance construction, independent of the trial seeds.
inline std::uint64_t instance_seed(std::uint64_t master) { return splitmix64(master ^ 0x5EED5EED5EED5EEDULL); }

/// Pass unless P[Bin(trials, 1 - delta) <= successes] <= alpha.
inline bool consistent_with_guarantee(std::size_t successes, std::size_t trials, double delta, double alpha = 0.05) {
    if (trials == 0) return true;
    const boost::math::binomial_distribution<double> bin(static_cast<double>(trials), 1.0 - delta);
    return boost::math::cdf(bin, static_cast<double>(successes)) > alpha;
}

inline bool is_single_district_algorithm(Algorithm a) {
    return a == Algorithm::SinglePlurality || a == Algorithm::MedianKnown || a == Algorithm::MedianUnknown ||
           a == Algorithm::NoisySingle;
}

inline bool is_mov_algorithm(Algorithm a) { return a == Algorithm::MovAdditive || a == Algorithm::MovMultiplicative; }

/// Everything a trial needs, built once per configuration.
struct PreparedExperiment {
    Election election;
    TieBreak tie;
    Rule rule = Rule::Plurality;
    Candidate winner;
    std::uint64_t mov = 0;
    std::optional<BiasedDistribution> district_bias;
    std::vector<BiasedDistribution> vote_bias;
};

inline Election build_instance(const ExperimentConfig& c, TieBreak& tie) {
    const double margin = c.margin.value_or(c.epsilon);
    const std::uint64_t seed = instance_seed(c.seed);
    if (c.family == "file") {
        if (!c.instance) throw ParameterError("family 'file' needs an input election");
        tie = TieBreak::ascending(c.instance->num_candidates);
        return *c.instance;
    }
    if (c.family == "planted") {
        PlantSpec s;
        s.m = 2;
        s.k = c.k;
        s.n = c.n;
        s.sizes = c.sizes;
        s.kappa = c.kappa;
        s.gamma = rational_from_double(margin);
        s.seed = seed;
        auto inst = gen_planted_2cand(s);
        tie = inst.tie;
        return std::move(inst.election);
    }
    if (c.family == "lb1" || c.family == "lb2") {
        auto inst = c.family == "lb1" ? gen_lowerbound_districts(rational_from_double(margin), c.n, c.k)
                                      : gen_lowerbound_votes(rational_from_double(margin), c.n, c.k);
        tie = inst.tie;
        return std::move(inst.election);
    }
    if (c.family == "single-peaked") {
        const std::uint64_t n = c.n % 2 == 0 ? c.n + 1 : c.n;
        const auto per = static_cast<std::uint64_t>(floor_of(rational_from_double(margin) * n)) + 1;
        tie = TieBreak::ascending(std::max<std::size_t>(c.m, 3));
        return gen_planted_median(std::max<std::size_t>(c.m, 3), c.k, n, std::min(per, (n + 1) / 2), seed, false)
            .election;
    }
    if (c.family == "random") {
        Rng rng(seed);
        tie = TieBreak::ascending(c.m);
        return gen_random(c.m, c.k, std::max<std::uint64_t>(1, c.n / 2), 2 * c.n, rng);
    }
    if (c.family == "unanimous") {
        std::vector<DistrictProfile> ds;
        for (std::size_t j = 0; j < c.k; ++j) {
            std::vector<std::uint64_t> counts(c.m, 0);
            counts[0] = c.n;
            ds.push_back(DistrictProfile::from_counts(std::move(counts)));
        }
        tie = TieBreak::ascending(c.m);
        return Election::make(c.m, std::move(ds), HarmoniousOrder::identity(c.m));
    }
    throw ParameterError("unknown family '" + c.family + "'");
}

inline PreparedExperiment prepare(const ExperimentConfig& c) {
    PreparedExperiment p;
    p.election = build_instance(c, p.tie);
    validate(p.election);
    const bool median = c.algorithm == Algorithm::MedianKnown || c.algorithm == Algorithm::MedianUnknown ||
                        (c.algorithm == Algorithm::Generic && c.family == "single-peaked");
    p.rule = median ? Rule::Median : Rule::Plurality;
    if (is_single_district_algorithm(c.algorithm)) {
        if (p.election.k() > 1) {
            DistrictProfile d = p.election.districts[0];
            if (!d.order && p.election.order) d.order = p.election.order;
            p.election = Election::make(p.election.num_candidates, {std::move(d)});
        }
        if (c.algorithm == Algorithm::MedianKnown && p.election.order_for(0) == nullptr)
            throw RuleInapplicable("median-known needs a harmonious order");
    }
    p.winner = district_election_winner(p.election, p.rule, p.tie).winner;
    if (is_mov_algorithm(c.algorithm)) p.mov = election_mov_greedy_2cand(p.election, p.tie).value;

    Rng rng(splitmix64(instance_seed(c.seed)));
    const Rational gamma = rational_from_double(c.gamma);
    if (c.algorithm == Algorithm::NoisySingle && gamma > 0)
        p.vote_bias.push_back(gen_biased_distribution(p.election.districts[0], gamma, c.adversary, rng, p.tie));
    if (c.algorithm == Algorithm::NoisyDistricts && gamma > 0) {
        p.district_bias = gen_biased_district_distribution(p.election, gamma, c.adversary, rng, p.tie);
        for (const auto& d : p.election.districts) p.vote_bias.push_back(gen_biased_distribution(d, gamma, c.adversary, rng, p.tie));
    }
    return p;
}

struct TrialResult {
    bool success = false;
    std::uint64_t samples = 0;
};

/// One run of a predictor algorithm on a prepared instance.
inline PredictionOutcome predict_once(const ExperimentConfig& c, const PreparedExperiment& p, Rng& rng) {
    PredictOptions opts;
    opts.tie = p.tie;
    const Election& e = p.election;
    switch (c.algorithm) {
        case Algorithm::Alg1:
            return predict_plurality_known_mov(e, c.epsilon, c.delta, rng, c.scale, opts);
        case Algorithm::Generic: {
            const auto sub = p.rule == Rule::Median ? median_subpredictor(c.scale) : plurality_subpredictor(c.scale, p.tie);
            return predict_generic_known_mov(e, sub, c.epsilon, c.delta, rng, c.scale, opts);
        }
        case Algorithm::Alg3:
            return predict_2cand_unknown_mov_bounded(e, c.delta, c.kappa, rng, c.scale, opts);
        case Algorithm::Alg4:
            return predict_2cand_unknown_mov_arbitrary(e, c.delta, rng, c.scale, opts);
        case Algorithm::SinglePlurality:
            return predict_plurality_noisy_single(e.districts[0], c.epsilon, c.delta, nullptr, rng, c.scale, opts);
        case Algorithm::MedianKnown:
            return predict_median_single(e.districts[0], c.epsilon, c.delta, e.order_for(0), rng, c.scale, opts);
        case Algorithm::MedianUnknown:
            return predict_median_single(e.districts[0], c.epsilon, c.delta, nullptr, rng, c.scale, opts);
        case Algorithm::NoisySingle:
            return predict_plurality_noisy_single(e.districts[0], c.epsilon, c.delta,
                                                  p.vote_bias.empty() ? nullptr : &p.vote_bias[0], rng, c.scale, opts);
        case Algorithm::NoisyDistricts:
            return predict_plurality_noisy_districts(e, c.epsilon, c.delta, p.district_bias ? &*p.district_bias : nullptr,
                                                     p.vote_bias, rng, c.scale, opts);
        case Algorithm::MovAdditive:
        case Algorithm::MovMultiplicative:
            break;
    }
    throw ParameterError("'" + std::string(algorithm_name(c.algorithm)) + "' is not a winner predictor");
}

/// One run of a MOV estimator on a prepared instance.
inline MOVEstimate estimate_once(const ExperimentConfig& c, const PreparedExperiment& p, Rng& rng) {
    if (c.algorithm == Algorithm::MovAdditive)
        return estimate_mov_additive(p.election, c.epsilon, c.delta, c.kappa, rng, c.scale, p.tie);
    if (c.algorithm == Algorithm::MovMultiplicative)
        return estimate_mov_multiplicative(sampling_additive_oracle(p.election, c.kappa, rng, c.scale), c.epsilon,
                                           c.delta, p.election.total_population);
    throw ParameterError("'" + std::string(algorithm_name(c.algorithm)) + "' is not a MOV estimator");
}

/// Whether an estimate lands in the declared error band around the exact MOV.
inline bool within_band(const MOVEstimate& est, std::uint64_t mov, std::uint64_t total_population) {
    const Rational truth(mov);
    if (est.regime == ErrorRegime::Additive) {
        const Rational err = est.value - truth;
        const Rational band = est.epsilon * total_population;
        return err <= band && -err <= band;
    }
    return est.value >= (1 - est.epsilon) * truth && est.value <= (1 + est.epsilon) * truth;
}

inline TrialResult run_trial(const ExperimentConfig& c, const PreparedExperiment& p, Rng& rng) {
    if (is_mov_algorithm(c.algorithm)) {
        const auto est = estimate_once(c, p, rng);
        return {within_band(est, p.mov, p.election.total_population), est.samples.total()};
    }
    const auto o = predict_once(c, p, rng);
    return {o.winner == p.winner, o.samples.total()};
}

/// T independent trials; trial i uses trial_seed(seed, i). The result does
/// not depend on the worker count.
inline TrialStats mc_eval(const ExperimentConfig& c) {
    if (c.trials < 1) throw ParameterError("trials must be >= 1");
    const PreparedExperiment p = prepare(c);
    std::vector<TrialResult> results(c.trials);
    std::vector<std::exception_ptr> errors(c.trials);

    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < c.trials; i += stride) {
            try {
                Rng rng(trial_seed(c.seed, i));
                results[i] = run_trial(c, p, rng);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(c.workers, c.trials));
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    TrialStats s;
    s.trials = c.trials;
    s.seed = c.seed;
    s.config = c;
    for (const auto& r : results) {
        s.successes += r.success;
        s.sample_counts.push_back(r.samples);
    }
    return s;
}

/// One row per configuration; a failing row records its error and the others run on.
inline std::vector<TrialStats> sweep(const std::vector<ExperimentConfig>& configs) {
    std::vector<TrialStats> rows;
    rows.reserve(configs.size());
    for (const auto& c : configs) {
        try {
            rows.push_back(mc_eval(c));
        } catch (const std::exception& ex) {
            TrialStats s;
            s.seed = c.seed;
            s.config = c;
            s.error = ex.what();
            rows.push_back(std::move(s));
        }
    }
    return rows;
}

namespace detail {

/// Shortest text that reads back to the same double.
inline std::string fmt_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace detail

inline const char* kCsvHeader =
    "algorithm,family,epsilon,delta,kappa,gamma,scale,trials,seed,successes,success_rate,mean_samples,min_samples,"
    "max_samples,error";

inline void write_csv_row(std::ostream& out, const TrialStats& s) {
    using detail::fmt_double;
    const auto& c = s.config;
    out << algorithm_name(c.algorithm) << ',' << c.family << ',' << fmt_double(c.epsilon) << ',' << fmt_double(c.delta)
        << ',' << fmt_double(c.kappa) << ',' << fmt_double(c.gamma) << ',' << fmt_double(c.scale) << ',' << c.trials << ','
        << c.seed << ',' << s.successes << ',' << fmt_double(s.success_rate()) << ',' << fmt_double(s.mean_samples())
        << ',' << s.min_samples() << ',' << s.max_samples() << ',' << detail::csv_escape(s.error) << '\n';
}

inline void write_csv(std::ostream& out, const std::vector<TrialStats>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) write_csv_row(out, r);
}

inline nlohmann::json to_json(const TrialStats& s) {
    const auto& c = s.config;
    nlohmann::json j;
    j["algorithm"] = algorithm_name(c.algorithm);
    j["family"] = c.family;
    j["epsilon"] = c.epsilon;
    j["delta"] = c.delta;
    j["kappa"] = c.kappa;
    j["gamma"] = c.gamma;
    j["scale"] = c.scale;
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    j["successes"] = s.successes;
    j["success_rate"] = s.success_rate();
    j["mean_samples"] = s.mean_samples();
    j["min_samples"] = s.min_samples();
    j["max_samples"] = s.max_samples();
    j["sample_counts"] = s.sample_counts;
    if (!s.error.empty()) j["error"] = s.error;
    return j;
}

}  // namespace ballot
