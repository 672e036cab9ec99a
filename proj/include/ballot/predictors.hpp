#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ballot/election.hpp"
#include "ballot/errors.hpp"
#include "ballot/plan.hpp"
#include "ballot/rational.hpp"
#include "ballot/rules.hpp"
#include "ballot/sampling.hpp"

namespace ballot {

/// One round of sampling: budgets, and with detail enabled the sampled
/// district indices and their predicted winners.
struct StageRecord {
    std::uint64_t l1 = 0;
    std::uint64_t l2 = 0;
    std::optional<Rational> gamma;
    std::vector<std::size_t> districts;
    std::vector<Candidate> predictions;
};

struct PredictionOutcome {
    Candidate winner;
    SampleLedger samples;
    std::vector<StageRecord> stage_log;
    /// 1-based round at which an iterative algorithm halted.
    std::optional<std::size_t> terminated_at;
    /// Set when no sampled Condorcet winner existed and maximin was used.
    bool fallback_used = false;
};

struct PredictOptions {
    bool keep_stage_detail = false;
    /// Iterative algorithms stop with IterationCap once gamma drops below this.
    double gamma_floor = 1.0 / 1048576.0;
    /// Iterative algorithms stop with IterationCap when a round would draw more votes.
    std::uint64_t max_round_votes = 4'000'000'000'000ULL;
    bool replacement = true;
    std::optional<TieBreak> tie;
};

namespace detail {

inline TieBreak tie_for(const PredictOptions& o, std::size_t m) {
    if (o.tie) {
        check_tie_size(*o.tie, m);
        return *o.tie;
    }
    return TieBreak::ascending(m);
}

inline void require_two_candidates(const Election& e) {
    if (e.num_candidates != 2) throw DimensionError("algorithm requires exactly 2 candidates");
}

inline void require_bounded_populations(const Election& e, const Rational& kappa) {
    const std::uint64_t max_n = std::max_element(e.districts.begin(), e.districts.end(), [](const auto& a, const auto& b) {
                                    return a.population < b.population;
                                })->population;
    if (Rational(max_n) * e.k() > kappa * e.total_population)
        throw ParameterError("a district population exceeds kappa times the average");
}

inline std::uint64_t ceil_u64(const Rational& r) { return static_cast<std::uint64_t>(ceil_of(r)); }

/// Axes are built from both ends: whatever is ranked last among the remaining
/// candidates must sit at an end of the remaining axis.
inline bool find_axis(std::vector<const Ranking*> const& rs, std::vector<bool>& used, std::vector<Candidate>& left,
                      std::vector<Candidate>& right, std::size_t m, HarmoniousOrder& out) {
    if (left.size() + right.size() == m) {
        HarmoniousOrder h;
        h.order = left;
        h.order.insert(h.order.end(), right.rbegin(), right.rend());
        for (const auto* r : rs)
            if (!is_single_peaked(*r, h)) return false;
        out = std::move(h);
        return true;
    }
    std::set<std::uint32_t> bottoms;
    for (const auto* r : rs)
        for (auto it = r->order.rbegin(); it != r->order.rend(); ++it)
            if (!used[it->idx()]) {
                bottoms.insert(it->index);
                break;
            }
    if (bottoms.size() > 2) return false;
    if (bottoms.empty())
        for (std::size_t c = 0; c < m; ++c)
            if (!used[c]) {
                bottoms.insert(static_cast<std::uint32_t>(c));
                break;
            }
    std::vector<Candidate> b;
    for (auto c : bottoms) b.emplace_back(c);

    auto attempt = [&](std::optional<Candidate> l, std::optional<Candidate> r) {
        if (l) {
            left.push_back(*l);
            used[l->idx()] = true;
        }
        if (r) {
            right.push_back(*r);
            used[r->idx()] = true;
        }
        const bool ok = find_axis(rs, used, left, right, m, out);
        if (l) {
            left.pop_back();
            used[l->idx()] = false;
        }
        if (r) {
            right.pop_back();
            used[r->idx()] = false;
        }
        return ok;
    };
    if (b.size() == 2) return attempt(b[0], b[1]) || attempt(b[1], b[0]);
    return attempt(b[0], std::nullopt) || attempt(std::nullopt, b[0]);
}

}  // namespace detail

/// Some axis along which every ranking is single-peaked, if one exists.
inline std::optional<HarmoniousOrder> find_single_peaked_axis(std::span<const Ranking> rankings, std::size_t m) {
    std::vector<const Ranking*> rs;
    for (const auto& r : rankings) rs.push_back(&r);
    std::vector<bool> used(m, false);
    std::vector<Candidate> left, right;
    HarmoniousOrder out;
    if (detail::find_axis(rs, used, left, right, m, out)) return out;
    return std::nullopt;
}

/// Plurality winner of l2 votes sampled from each of l1 sampled districts; MAJ over the districts.
inline PredictionOutcome predict_plurality_known_mov(const Election& e, double epsilon, double delta, Rng& rng,
                                                     double scale = 1.0, const PredictOptions& opts = {}) {
    const auto p = plan(Algorithm::Alg1, {epsilon, delta, {}, {}, scale});
    const auto tie = detail::tie_for(opts, e.num_candidates);
    PredictionOutcome out;
    StageRecord st{p.l1, p.l2, {}, {}, {}};
    const auto districts = sample_districts(e, p.l1, nullptr, rng, out.samples);
    std::vector<Candidate> preds;
    preds.reserve(districts.size());
    for (auto j : districts) {
        const auto x = sample_votes(e.districts[j], p.l2, opts.replacement, nullptr, rng, out.samples);
        preds.push_back(plurality_winner(x, tie));
    }
    out.winner = maj(preds, tie);
    if (opts.keep_stage_detail) {
        st.districts = districts;
        st.predictions = preds;
    }
    out.stage_log.push_back(std::move(st));
    return out;
}

/// Single-district predictor used inside the district-level composition.
/// `predict` gets closeness eps and failure probability delta; `chi` is the
/// number of votes it draws for those parameters.
struct DistrictSubPredictor {
    std::string name;
    std::function<std::uint64_t(std::size_t m, double epsilon, double delta)> chi;
    std::function<Candidate(const Election&, std::size_t j, double epsilon, double delta, Rng&, SampleLedger&)> predict;
};

inline DistrictSubPredictor plurality_subpredictor(double scale = 1.0, std::optional<TieBreak> tie = std::nullopt,
                                                   bool replacement = true) {
    auto chi = [scale](std::size_t, double eps, double delta) {
        return budget(scale, plurality_votes_formula(eps / 2.0, delta));
    };
    auto predict = [chi, tie, replacement](const Election& e, std::size_t j, double eps, double delta, Rng& rng,
                                           SampleLedger& ledger) {
        const auto t = tie ? *tie : TieBreak::ascending(e.num_candidates);
        const auto x = sample_votes(e.districts[j], chi(e.num_candidates, eps, delta), replacement, nullptr, rng, ledger);
        return plurality_winner(x, t);
    };
    return {"plurality", chi, predict};
}

/// Reads the whole district; always returns its true winner.
inline DistrictSubPredictor census_subpredictor(Rule rule = Rule::Plurality, std::optional<TieBreak> tie = std::nullopt) {
    auto chi = [](std::size_t, double, double) -> std::uint64_t { return 0; };
    auto predict = [rule, tie](const Election& e, std::size_t j, double, double, Rng&, SampleLedger& ledger) {
        ledger.votes_drawn += e.districts[j].population;
        return district_winner(e, j, rule, tie ? *tie : TieBreak::ascending(e.num_candidates));
    };
    return {"census", chi, predict};
}

/// MAJ over l1 sampled districts of the sub-predictor run at closeness eps/4
/// and failure probability eps/32.
inline PredictionOutcome predict_generic_known_mov(const Election& e, const DistrictSubPredictor& sub, double epsilon,
                                                   double delta, Rng& rng, double scale = 1.0,
                                                   const PredictOptions& opts = {}) {
    const auto p = plan(Algorithm::Generic, {epsilon, delta, {}, {}, scale});
    const auto tie = detail::tie_for(opts, e.num_candidates);
    PredictionOutcome out;
    StageRecord st{p.l1, sub.chi(e.num_candidates, epsilon / 4.0, epsilon / 32.0), {}, {}, {}};
    const auto districts = sample_districts(e, p.l1, nullptr, rng, out.samples);
    std::vector<Candidate> preds;
    preds.reserve(districts.size());
    for (auto j : districts) preds.push_back(sub.predict(e, j, epsilon / 4.0, epsilon / 32.0, rng, out.samples));
    out.winner = maj(preds, tie);
    if (opts.keep_stage_detail) {
        st.districts = districts;
        st.predictions = preds;
    }
    out.stage_log.push_back(std::move(st));
    return out;
}

namespace detail {

struct IterativeSpec {
    Algorithm algorithm;
    Rational start;
    Rational shrink;
    std::function<Rational(const Rational&)> district_fraction;
    std::function<Rational(const Rational&)> vote_fraction;
    std::optional<double> kappa;
};

inline PredictionOutcome run_iterative(const Election& e, double delta, Rng& rng, double scale,
                                       const PredictOptions& opts, const IterativeSpec& spec) {
    require_two_candidates(e);
    PredictionOutcome out;
    Rational gamma = spec.start;
    for (std::size_t round = 1;; ++round) {
        const double g = to_double(gamma);
        if (g < opts.gamma_floor)
            throw IterationCap("gamma fell below the floor after " + std::to_string(round - 1) + " rounds");
        const auto p = plan(spec.algorithm, {0, delta, spec.kappa, g, scale});
        if (static_cast<long double>(p.l1) * p.l2 > static_cast<long double>(opts.max_round_votes))
            throw IterationCap("round " + std::to_string(round) + " would exceed the vote cap");

        const std::uint64_t need_votes = ceil_u64(spec.vote_fraction(gamma) * p.l2);
        const std::uint64_t need_districts = ceil_u64(spec.district_fraction(gamma) * p.l1);

        StageRecord st{p.l1, p.l2, gamma, {}, {}};
        const auto districts = sample_districts(e, p.l1, nullptr, rng, out.samples);
        std::uint64_t strong[2] = {0, 0};
        for (auto j : districts) {
            const auto x = sample_votes(e.districts[j], p.l2, opts.replacement, nullptr, rng, out.samples);
            std::optional<Candidate> w;
            for (std::size_t c = 0; c < 2; ++c)
                if (x[c] >= need_votes) {
                    strong[c]++;
                    w = Candidate(c);
                }
            if (opts.keep_stage_detail) st.predictions.push_back(w ? *w : plurality_winner(x, tie_for(opts, 2)));
        }
        if (opts.keep_stage_detail) st.districts = districts;
        out.stage_log.push_back(std::move(st));

        for (std::size_t c = 0; c < 2; ++c)
            if (strong[c] >= need_districts) {
                out.winner = Candidate(c);
                out.terminated_at = round;
                return out;
            }
        gamma /= spec.shrink;
    }
}

}  // namespace detail

/// Two candidates, unknown margin, every population at most kappa times the average.
inline PredictionOutcome predict_2cand_unknown_mov_bounded(const Election& e, double delta, double kappa, Rng& rng,
                                                           double scale = 1.0, const PredictOptions& opts = {}) {
    detail::require_two_candidates(e);
    if (!(kappa >= 4)) throw ParameterError("kappa >= 4 is required");
    const Rational k = rational_from_double(kappa);
    detail::require_bounded_populations(e, k);
    detail::IterativeSpec spec{
        Algorithm::Alg3,
        Rational(1, 3),
        Rational(3),
        [k](const Rational& g) { return Rational(1, 2) + 3 * g / k; },
        [k](const Rational& g) { return Rational(1, 2) + 2 * g / k; },
        kappa,
    };
    return detail::run_iterative(e, delta, rng, scale, opts, spec);
}

/// Two candidates, unknown margin, arbitrary district populations.
inline PredictionOutcome predict_2cand_unknown_mov_arbitrary(const Election& e, double delta, Rng& rng,
                                                             double scale = 1.0, const PredictOptions& opts = {}) {
    detail::IterativeSpec spec{
        Algorithm::Alg4,
        Rational(1, 2),
        Rational(2),
        [](const Rational& g) { return Rational(1, 2) + g / 5; },
        [](const Rational& g) { return Rational(1, 2) + 5 * g * g / 128; },
        std::nullopt,
    };
    return detail::run_iterative(e, delta, rng, scale, opts, spec);
}

namespace detail {

inline std::vector<std::uint64_t> tops_of(const Profile& blocks, std::span<const std::uint64_t> mult, std::size_t m) {
    std::vector<std::uint64_t> out(m, 0);
    for (std::size_t i = 0; i < blocks.size(); ++i) out[blocks[i].ranking.top().idx()] += mult[i];
    return out;
}

/// Median winner of l sampled votes along `order`. Districts that carry
/// rankings are sampled ranking-wise so that this path and the Condorcet
/// path consume the random stream identically.
inline Candidate median_known_sample(const DistrictProfile& d, std::uint64_t l, const HarmoniousOrder& order, Rng& rng,
                                     SampleLedger& ledger) {
    if (d.rankings) {
        const auto mult = sample_rankings(d, l, rng, ledger);
        return median_winner(tops_of(*d.rankings, mult, d.top_counts.size()), order);
    }
    return median_winner(sample_votes(d, l, true, nullptr, rng, ledger), order);
}

inline Candidate median_unknown_sample(const DistrictProfile& d, std::uint64_t l, const TieBreak& tie, Rng& rng,
                                       SampleLedger& ledger, bool& fallback) {
    if (!d.rankings) throw RuleInapplicable("median without a known order needs full rankings");
    const std::size_t m = d.top_counts.size();
    const auto mult = sample_rankings(d, l, rng, ledger);
    std::vector<Ranking> seen;
    PairwiseMatrix h(m);
    for (std::size_t i = 0; i < mult.size(); ++i) {
        if (mult[i] == 0) continue;
        seen.push_back((*d.rankings)[i].ranking);
        add_ranking(h, (*d.rankings)[i].ranking, mult[i]);
    }
    if (!find_single_peaked_axis(seen, m)) throw NotSinglePeaked("sampled rankings are not single-peaked on any axis");
    if (auto c = condorcet_winner(h)) return *c;
    fallback = true;
    return maximin_winner(h, tie);
}

}  // namespace detail

/// Median prediction for one district. With an order: sampled prefix median.
/// Without: Condorcet winner of an odd-sized sample of rankings.
inline PredictionOutcome predict_median_single(const DistrictProfile& d, double epsilon, double delta,
                                               const HarmoniousOrder* order, Rng& rng, double scale = 1.0,
                                               const PredictOptions& opts = {}) {
    const std::size_t m = d.top_counts.size();
    PredictionOutcome out;
    if (order) {
        const auto p = plan(Algorithm::MedianKnown, {epsilon, delta, {}, {}, scale});
        out.winner = detail::median_known_sample(d, p.l2, *order, rng, out.samples);
        out.stage_log.push_back({p.l1, p.l2, {}, {}, {}});
    } else {
        const auto p = plan(Algorithm::MedianUnknown, {epsilon, delta, {}, {}, scale});
        out.winner = detail::median_unknown_sample(d, p.l2, detail::tie_for(opts, m), rng, out.samples, out.fallback_used);
        out.stage_log.push_back({p.l1, p.l2, {}, {}, {}});
    }
    return out;
}

/// Median sub-predictor: the district's order when one is known, the
/// Condorcet path otherwise.
inline DistrictSubPredictor median_subpredictor(double scale = 1.0) {
    auto chi = [scale](std::size_t, double eps, double delta) { return budget(scale, median_votes_formula(eps, delta)); };
    auto predict = [chi](const Election& e, std::size_t j, double eps, double delta, Rng& rng, SampleLedger& ledger) {
        const auto& d = e.districts[j];
        std::uint64_t l = chi(e.num_candidates, eps, delta);
        if (const auto* order = e.order_for(j)) return detail::median_known_sample(d, l, *order, rng, ledger);
        if (l % 2 == 0) ++l;
        bool fallback = false;
        return detail::median_unknown_sample(d, l, TieBreak::ascending(e.num_candidates), rng, ledger, fallback);
    };
    return {"median", chi, predict};
}

/// Plurality of votes drawn from a possibly biased distribution over one district's voters.
inline PredictionOutcome predict_plurality_noisy_single(const DistrictProfile& d, double epsilon, double delta,
                                                        const BiasedDistribution* bias, Rng& rng, double scale = 1.0,
                                                        const PredictOptions& opts = {}) {
    const double gamma = bias ? to_double(bias->declared_tv) : 0.0;
    const auto p = plan(Algorithm::NoisySingle, {epsilon, delta, {}, gamma, scale});
    PredictionOutcome out;
    const auto x = sample_votes(d, p.l2, opts.replacement, bias, rng, out.samples);
    out.winner = plurality_winner(x, detail::tie_for(opts, d.top_counts.size()));
    out.stage_log.push_back({p.l1, p.l2, {}, {}, {}});
    return out;
}

/// District-level plurality with biased district and vote distributions.
/// `vote_bias` is empty (uniform everywhere) or holds one distribution per district.
inline PredictionOutcome predict_plurality_noisy_districts(const Election& e, double epsilon, double delta,
                                                           const BiasedDistribution* district_bias,
                                                           std::span<const BiasedDistribution> vote_bias, Rng& rng,
                                                           double scale = 1.0, const PredictOptions& opts = {}) {
    if (!vote_bias.empty() && vote_bias.size() != e.k())
        throw DimensionError("need one vote distribution per district");
    Rational gamma = district_bias ? district_bias->declared_tv : Rational(0);
    for (const auto& b : vote_bias) gamma = std::max(gamma, b.declared_tv);
    const auto p = plan(Algorithm::NoisyDistricts, {epsilon, delta, {}, to_double(gamma), scale});
    const auto tie = detail::tie_for(opts, e.num_candidates);
    PredictionOutcome out;
    StageRecord st{p.l1, p.l2, gamma, {}, {}};
    const auto districts = sample_districts(e, p.l1, district_bias, rng, out.samples);
    std::vector<Candidate> preds;
    preds.reserve(districts.size());
    for (auto j : districts) {
        const BiasedDistribution* vb = vote_bias.empty() ? nullptr : &vote_bias[j];
        preds.push_back(plurality_winner(sample_votes(e.districts[j], p.l2, opts.replacement, vb, rng, out.samples), tie));
    }
    out.winner = maj(preds, tie);
    if (opts.keep_stage_detail) {
        st.districts = districts;
        st.predictions = preds;
    }
    out.stage_log.push_back(std::move(st));
    return out;
}

}  // namespace ballot
