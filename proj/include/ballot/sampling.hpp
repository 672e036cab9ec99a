#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ballot/election.hpp"
#include "ballot/errors.hpp"
#include "ballot/rational.hpp"

namespace ballot {

using Rng = std::mt19937_64;

/// Running totals of everything drawn.
struct SampleLedger {
    std::uint64_t votes_drawn = 0;
    std::uint64_t districts_drawn = 0;

    std::uint64_t total() const { return votes_drawn + districts_drawn; }

    SampleLedger& operator+=(const SampleLedger& o) {
        votes_drawn += o.votes_drawn;
        districts_drawn += o.districts_drawn;
        return *this;
    }
    bool operator==(const SampleLedger&) const = default;
};

/// Sampling distribution over the voters of one district (voters ordered by
/// top choice: the first top_counts[0] voters back candidate 0, and so on) or
/// over the districts of an election.
struct BiasedDistribution {
    std::vector<Rational> weights;
    Rational declared_tv;
    /// Probability mass held by each candidate's voters; empty for district-level weights.
    std::vector<Rational> candidate_mass;

    bool is_uniform() const { return declared_tv == 0; }
};

/// Sum over entries above 1/N of (w - 1/N).
inline Rational tv_distance(std::span<const Rational> weights) {
    if (weights.empty()) return Rational(0);
    const Rational uniform(1, static_cast<long long>(weights.size()));
    Rational tv(0);
    for (const auto& w : weights)
        if (w > uniform) tv += w - uniform;
    return tv;
}

/// Voter-level distribution for a district with the given top-choice counts.
inline BiasedDistribution make_voter_distribution(std::vector<Rational> weights, Rational declared_tv,
                                                  std::span<const std::uint64_t> counts) {
    const auto n = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (weights.size() != n) throw DimensionError("voter weights do not match district population");
    Rational sum(0);
    for (const auto& w : weights) {
        if (w < 0) throw InvariantViolation("negative voter weight");
        sum += w;
    }
    if (sum != 1) throw InvariantViolation("voter weights do not sum to 1");
    if (tv_distance(weights) > declared_tv) throw InvariantViolation("actual TV distance exceeds declared bound");
    BiasedDistribution d{std::move(weights), std::move(declared_tv), {}};
    std::size_t voter = 0;
    for (auto g : counts) {
        Rational mass(0);
        for (std::uint64_t i = 0; i < g; ++i) mass += d.weights[voter++];
        d.candidate_mass.push_back(mass);
    }
    return d;
}

inline BiasedDistribution make_district_distribution(std::vector<Rational> weights, Rational declared_tv) {
    Rational sum(0);
    for (const auto& w : weights) {
        if (w < 0) throw InvariantViolation("negative district weight");
        sum += w;
    }
    if (sum != 1) throw InvariantViolation("district weights do not sum to 1");
    if (tv_distance(weights) > declared_tv) throw InvariantViolation("actual TV distance exceeds declared bound");
    return BiasedDistribution{std::move(weights), std::move(declared_tv), {}};
}

namespace detail {

/// Multinomial draw of l items over cells with conditional probabilities
/// cond[c] = P(cell c | not in cells before c).
inline std::vector<std::uint64_t> multinomial(std::uint64_t l, std::span<const double> cond, Rng& rng) {
    std::vector<std::uint64_t> out(cond.size(), 0);
    std::uint64_t rem = l;
    for (std::size_t c = 0; c + 1 < cond.size() && rem > 0; ++c) {
        const double p = cond[c];
        std::uint64_t x = 0;
        if (p >= 1.0) {
            x = rem;
        } else if (p > 0.0) {
            std::binomial_distribution<std::uint64_t> bin(rem, p);
            x = bin(rng);
        }
        out[c] = x;
        rem -= x;
    }
    if (!cond.empty()) out.back() += rem;
    return out;
}

inline std::vector<double> uniform_conditionals(std::span<const std::uint64_t> counts) {
    std::vector<double> cond(counts.size(), 0.0);
    std::uint64_t rem = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    for (std::size_t c = 0; c < counts.size(); ++c) {
        cond[c] = rem == 0 ? 0.0 : static_cast<double>(counts[c]) / static_cast<double>(rem);
        rem -= counts[c];
    }
    return cond;
}

inline std::vector<double> mass_conditionals(std::span<const Rational> mass) {
    std::vector<double> cond(mass.size(), 0.0);
    Rational rem(0);
    for (const auto& x : mass) rem += x;
    for (std::size_t c = 0; c < mass.size(); ++c) {
        cond[c] = rem == 0 ? 0.0 : to_double(mass[c] / rem);
        rem -= mass[c];
    }
    return cond;
}

}  // namespace detail

/// Top-choice tallies of l voters drawn from one district. Draws are i.i.d.
/// from `dist` (uniform when null or zero-bias) with replacement, or a
/// uniform/weighted draw without replacement.
inline std::vector<std::uint64_t> sample_votes(const DistrictProfile& d, std::uint64_t l, bool replacement,
                                               const BiasedDistribution* dist, Rng& rng, SampleLedger& ledger) {
    if (l < 1) throw ParameterError("vote sample size must be >= 1");
    const std::size_t m = d.top_counts.size();
    const bool uniform = dist == nullptr || dist->is_uniform();
    std::vector<std::uint64_t> out;

    if (replacement) {
        if (uniform) {
            const auto cond = detail::uniform_conditionals(d.top_counts);
            out = detail::multinomial(l, cond, rng);
        } else {
            if (dist->candidate_mass.size() != m) throw DimensionError("distribution is not voter-level for this district");
            const auto cond = detail::mass_conditionals(dist->candidate_mass);
            out = detail::multinomial(l, cond, rng);
        }
    } else if (uniform) {
        if (l > d.population) throw BudgetExceedsPopulation("cannot draw " + std::to_string(l) + " of " +
                                                            std::to_string(d.population) + " voters without replacement");
        std::vector<std::uint64_t> rem = d.top_counts;
        std::uint64_t left = d.population;
        out.assign(m, 0);
        for (std::uint64_t i = 0; i < l; ++i) {
            std::uniform_int_distribution<std::uint64_t> pick(0, left - 1);
            std::uint64_t r = pick(rng);
            std::size_t c = 0;
            while (r >= rem[c]) r -= rem[c++];
            rem[c]--;
            out[c]++;
            left--;
        }
    } else {
        if (dist->weights.size() != d.population) throw DimensionError("distribution is not voter-level for this district");
        std::vector<std::pair<double, std::size_t>> keys;
        keys.reserve(d.population);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t v = 0; v < dist->weights.size(); ++v) {
            const double w = to_double(dist->weights[v]);
            const double u = unit(rng);
            if (w > 0) keys.emplace_back(std::log(u) / w, v);
        }
        if (l > keys.size()) throw BudgetExceedsPopulation("cannot draw " + std::to_string(l) +
                                                           " voters without replacement from the support");
        std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(l), keys.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
        std::vector<std::uint64_t> bounds(m);
        std::partial_sum(d.top_counts.begin(), d.top_counts.end(), bounds.begin());
        out.assign(m, 0);
        for (std::uint64_t i = 0; i < l; ++i) {
            const auto c = static_cast<std::size_t>(
                std::upper_bound(bounds.begin(), bounds.end(), keys[i].second) - bounds.begin());
            out[c]++;
        }
    }
    ledger.votes_drawn += l;
    return out;
}

/// l1 district indices drawn i.i.d. with replacement.
inline std::vector<std::size_t> sample_districts(const Election& e, std::uint64_t l1, const BiasedDistribution* dist,
                                                 Rng& rng, SampleLedger& ledger) {
    if (l1 < 1) throw ParameterError("district sample size must be >= 1");
    std::vector<std::size_t> out(l1);
    if (dist == nullptr || dist->is_uniform()) {
        std::uniform_int_distribution<std::size_t> pick(0, e.k() - 1);
        for (auto& j : out) j = pick(rng);
    } else {
        if (dist->weights.size() != e.k()) throw DimensionError("district distribution length differs from k");
        std::vector<double> w;
        w.reserve(e.k());
        for (const auto& x : dist->weights) w.push_back(to_double(x));
        std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
        for (auto& j : out) j = pick(rng);
    }
    ledger.districts_drawn += l1;
    return out;
}

/// Multiplicity of each ranking block among l voters drawn with replacement.
inline std::vector<std::uint64_t> sample_rankings(const DistrictProfile& d, std::uint64_t l, Rng& rng,
                                                  SampleLedger& ledger) {
    if (!d.rankings) throw RuleInapplicable("district has no rankings to sample");
    if (l < 1) throw ParameterError("vote sample size must be >= 1");
    std::vector<std::uint64_t> mult;
    mult.reserve(d.rankings->size());
    for (const auto& b : *d.rankings) mult.push_back(b.multiplicity);
    const auto cond = detail::uniform_conditionals(mult);
    ledger.votes_drawn += l;
    return detail::multinomial(l, cond, rng);
}

}  // namespace ballot
