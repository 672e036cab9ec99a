#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ballot/election.hpp"
#include "ballot/errors.hpp"
#include "ballot/oracles.hpp"
#include "ballot/plan.hpp"
#include "ballot/rational.hpp"
#include "ballot/rules.hpp"
#include "ballot/sampling.hpp"

namespace ballot {

enum class ErrorRegime { Additive, Multiplicative };

/// Per-class split of an additive estimate: flipped sampled districts grouped
/// by the class of the true district they copy. `cheap` are the winner's
/// districts an exact greedy flip uses, `other` the winner's remaining
/// districts, `loser` the districts the true loser already holds.
struct EstimateParts {
    Rational cheap;
    Rational other;
    Rational loser;
};

struct MOVEstimate {
    Rational value;
    ErrorRegime regime = ErrorRegime::Additive;
    Rational epsilon;
    SampleLedger samples;
    std::size_t rounds = 1;
    /// Multiplicative only: the loop ran out and the value is the fallback of 1.
    bool exhausted = false;
    std::optional<EstimateParts> parts;
    /// Winner of the sampled election.
    Candidate predicted_winner;
};

/// Votes the loser needs to take one district, from (possibly fractional) tallies.
inline std::uint64_t two_way_flip_cost(const Rational& winner_votes, const Rational& loser_votes, bool loser_wins_ties) {
    const Rational gap = winner_votes - loser_votes;
    if (gap < 0 || (gap == 0 && loser_wins_ties)) return 0;
    const Rational half = gap / 2;
    if (loser_wins_ties) return static_cast<std::uint64_t>(ceil_of(half));
    return static_cast<std::uint64_t>(floor_of(half)) + 1;
}

/// Additive-error MOV estimate for two candidates: the greedy MOV of the
/// sampled election on predicted tallies, scaled by k / l1.
inline MOVEstimate estimate_mov_additive(const Election& e, double epsilon, double delta, double kappa, Rng& rng,
                                         double scale = 1.0, std::optional<TieBreak> tie_opt = std::nullopt,
                                         bool with_parts = false) {
    if (e.num_candidates != 2) throw DimensionError("additive MOV estimation requires exactly 2 candidates");
    const auto p = plan(Algorithm::MovAdditive, {epsilon, delta, kappa, {}, scale});
    const Rational k_ratio = rational_from_double(kappa);
    const std::uint64_t max_n = std::max_element(e.districts.begin(), e.districts.end(), [](const auto& a, const auto& b) {
                                    return a.population < b.population;
                                })->population;
    if (Rational(max_n) * e.k() > k_ratio * e.total_population)
        throw ParameterError("a district population exceeds kappa times the average");
    const TieBreak tie = tie_opt ? *tie_opt : TieBreak::ascending(2);

    MOVEstimate out;
    out.epsilon = rational_from_double(epsilon);
    const auto districts = sample_districts(e, p.l1, nullptr, rng, out.samples);

    // Predicted tallies n_d * X / l2, kept exact.
    struct Copy {
        std::size_t district;
        Rational votes[2];
        Candidate winner;
    };
    std::vector<Copy> copies;
    copies.reserve(districts.size());
    std::size_t f[2] = {0, 0};
    for (auto j : districts) {
        const auto x = sample_votes(e.districts[j], p.l2, true, nullptr, rng, out.samples);
        Copy c{j, {Rational(e.districts[j].population * x[0], p.l2), Rational(e.districts[j].population * x[1], p.l2)}, {}};
        c.winner = c.votes[0] == c.votes[1] ? tie.priority().front() : Candidate(c.votes[0] > c.votes[1] ? 0 : 1);
        f[c.winner.idx()]++;
        copies.push_back(std::move(c));
    }
    Candidate w = Candidate(f[0] == f[1] ? tie.priority().front().idx() : (f[0] > f[1] ? 0 : 1));
    const Candidate l(1 - w.index);
    out.predicted_winner = w;

    std::vector<std::pair<std::uint64_t, std::size_t>> costs;
    for (std::size_t i = 0; i < copies.size(); ++i)
        if (copies[i].winner == w)
            costs.emplace_back(two_way_flip_cost(copies[i].votes[w.idx()], copies[i].votes[l.idx()], tie.favors(l, w)), i);
    std::sort(costs.begin(), costs.end());
    const std::size_t need = districts_to_flip(f[w.idx()], f[l.idx()], tie.favors(l, w));

    const Rational factor(static_cast<long long>(e.k()), static_cast<long long>(p.l1));
    BigInt total = 0;
    for (std::size_t i = 0; i < need; ++i) total += costs[i].first;
    out.value = factor * Rational(total);

    if (with_parts) {
        // Classify true districts: the cheapest ones the exact greedy flips, the
        // winner's others, and the loser's.
        const auto truth = district_election_winner(e, Rule::Plurality, tie);
        const Candidate tw = truth.winner;
        const Candidate tl(1 - tw.index);
        std::vector<int> cls(e.k(), 2);
        std::vector<std::pair<std::uint64_t, std::size_t>> won;
        for (std::size_t j = 0; j < e.k(); ++j)
            if (truth.district_winners[j] == tw) {
                cls[j] = 1;
                won.emplace_back(plurality_flip_cost(e.districts[j].top_counts, tl, tie), j);
            }
        std::sort(won.begin(), won.end());
        const auto ft = frequencies(truth.district_winners, 2);
        const std::size_t jstar = districts_to_flip(ft[tw.idx()], ft[tl.idx()], tie.favors(tl, tw));
        for (std::size_t i = 0; i < jstar; ++i) cls[won[i].second] = 0;
        EstimateParts parts{Rational(0), Rational(0), Rational(0)};
        for (std::size_t i = 0; i < need; ++i) {
            const Rational v = factor * Rational(costs[i].first);
            switch (cls[copies[costs[i].second].district]) {
                case 0: parts.cheap += v; break;
                case 1: parts.other += v; break;
                default: parts.loser += v; break;
            }
        }
        out.parts = parts;
    }
    return out;
}

/// Additive oracle for the multiplicative wrapper: (epsilon_i, delta_i) -> estimate.
using AdditiveOracle = std::function<Rational(const Rational& epsilon, const Rational& delta, SampleLedger&)>;

/// (1/eps + 1) / (1 + eps)^i.
inline Rational lambda(const Rational& epsilon, std::size_t i) {
    Rational pow(1);
    for (std::size_t t = 0; t < i; ++t) pow *= 1 + epsilon;
    return (1 / epsilon + 1) / pow;
}

inline std::size_t multiplicative_rounds(double epsilon, std::uint64_t n) {
    const double r = std::ceil(std::log(static_cast<double>(n)) / std::log1p(epsilon));
    return r < 1 ? 1 : static_cast<std::size_t>(r);
}

/// Multiplicative-error MOV estimate from any additive oracle.
inline MOVEstimate estimate_mov_multiplicative(const AdditiveOracle& oracle, double epsilon, double delta,
                                               std::uint64_t total_population) {
    if (!(epsilon > 0 && epsilon < 1)) throw ParameterError("epsilon must satisfy 0 < epsilon < 1");
    if (!(delta > 0 && delta < 1)) throw ParameterError("delta must satisfy 0 < delta < 1");
    if (total_population < 1) throw ParameterError("total population must be >= 1");
    const Rational eps = rational_from_double(epsilon);
    const Rational del = rational_from_double(delta);
    const std::size_t rounds = multiplicative_rounds(epsilon, total_population);

    MOVEstimate out;
    out.regime = ErrorRegime::Multiplicative;
    out.epsilon = eps;
    Rational pow(1);
    Rational two_pow(1);
    for (std::size_t i = 1; i <= rounds; ++i) {
        pow *= 1 + eps;
        two_pow *= 2;
        const Rational e_i = oracle(1 / pow, del / two_pow, out.samples);
        out.rounds = i;
        if (e_i >= lambda(eps, i) * total_population) {
            out.value = e_i;
            return out;
        }
    }
    out.value = Rational(1);
    out.exhausted = true;
    return out;
}

/// Oracle returning the exact MOV regardless of the requested accuracy.
inline AdditiveOracle exact_additive_oracle(const Election& e, std::optional<TieBreak> tie = std::nullopt) {
    const auto t = tie ? *tie : TieBreak::ascending(e.num_candidates);
    const Rational mov(election_mov_greedy_2cand(e, t).value);
    return [mov](const Rational&, const Rational&, SampleLedger&) { return mov; };
}

/// Oracle running the sampling estimator at each requested accuracy.
inline AdditiveOracle sampling_additive_oracle(const Election& e, double kappa, Rng& rng, double scale = 1.0) {
    return [&e, kappa, &rng, scale](const Rational& eps, const Rational& del, SampleLedger& ledger) {
        auto est = estimate_mov_additive(e, to_double(eps), to_double(del), kappa, rng, scale);
        ledger += est.samples;
        return est.value;
    };
}

}  // namespace ballot
