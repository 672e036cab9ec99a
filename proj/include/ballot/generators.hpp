#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ballot/election.hpp"
#include "ballot/errors.hpp"
#include "ballot/oracles.hpp"
#include "ballot/rational.hpp"
#include "ballot/rules.hpp"
#include "ballot/sampling.hpp"

namespace ballot {

enum class SizeRule { Equal, Capped, HeavyTailed };

inline SizeRule parse_size_rule(std::string_view s) {
    if (s == "equal") return SizeRule::Equal;
    if (s == "capped") return SizeRule::Capped;
    if (s == "heavy") return SizeRule::HeavyTailed;
    throw ParameterError("unknown size rule '" + std::string(s) + "'");
}

struct PlantSpec {
    std::size_t m = 2;
    std::size_t k = 1;
    SizeRule sizes = SizeRule::Equal;
    /// Base district population.
    std::uint64_t n = 10;
    /// Populations stay within kappa times the average (Capped only).
    double kappa = 4;
    /// Target MOV as a fraction of N.
    Rational gamma;
    std::uint64_t seed = 0;
};

/// A generated instance with its exact MOV. `saturated` is set when the
/// target exceeds what the size profile admits and the most lopsided
/// instance was returned instead.
struct PlantedInstance {
    Election election;
    TieBreak tie;
    std::uint64_t target = 0;
    std::uint64_t achieved = 0;
    bool saturated = false;

    std::int64_t slack() const { return static_cast<std::int64_t>(achieved) - static_cast<std::int64_t>(target); }
};

namespace detail {

inline std::vector<std::uint64_t> district_sizes(const PlantSpec& s, Rng& rng) {
    if (s.k < 1) throw ParameterError("k must be >= 1");
    if (s.n < 1) throw ParameterError("n must be >= 1");
    std::vector<std::uint64_t> sizes(s.k, s.n);
    switch (s.sizes) {
        case SizeRule::Equal:
            break;
        case SizeRule::Capped: {
            if (!(s.kappa >= 1)) throw ParameterError("kappa must be >= 1");
            std::uniform_int_distribution<std::uint64_t> pick((s.n + 1) / 2, 2 * s.n);
            for (int attempt = 0;; ++attempt) {
                for (auto& x : sizes) x = pick(rng);
                const auto total = std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
                const auto mx = *std::max_element(sizes.begin(), sizes.end());
                if (static_cast<double>(mx) * static_cast<double>(s.k) <= s.kappa * static_cast<double>(total)) break;
                if (attempt == 1000) throw Infeasible("cannot draw populations within kappa times the average");
            }
            break;
        }
        case SizeRule::HeavyTailed:
            if (s.k < 2) throw ParameterError("heavy-tailed sizes need k >= 2");
            sizes[0] = s.n * (s.k - 1);
            break;
    }
    return sizes;
}

/// Flip cost of a unanimous district of size n for a challenger that loses ties.
inline std::uint64_t max_two_way_cost(std::uint64_t n) { return n / 2 + 1; }

/// Counts (winner, loser) for a district of size n whose flip cost is c.
inline std::pair<std::uint64_t, std::uint64_t> counts_for_cost(std::uint64_t n, std::uint64_t c) {
    const std::uint64_t a = n % 2 == 0 ? (n + 2 * c - 2) / 2 : (n + 2 * c - 1) / 2;
    return {a, n - a};
}

}  // namespace detail

/// Two-candidate plurality instance whose exact MOV is round(gamma * N)
/// (at least 1). Candidate 0 wins; the loser's districts are the smallest and
/// unanimous; the margin is planted in the cheapest of the winner's districts.
inline PlantedInstance gen_planted_2cand(const PlantSpec& spec) {
    if (spec.m != 2) throw ParameterError("planted instances have exactly 2 candidates");
    if (spec.gamma < 0) throw ParameterError("gamma must be >= 0");
    if (spec.gamma > Rational(1, 2)) throw Infeasible("gamma above 1/2 is never achievable");
    Rng rng(spec.seed);
    auto sizes = detail::district_sizes(spec, rng);
    std::sort(sizes.begin(), sizes.end());
    const std::size_t k = spec.k;
    const std::uint64_t total = std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0});
    const auto target = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(floor_of(spec.gamma * total + Rational(1, 2))));
    const TieBreak tie = TieBreak::ascending(2);

    // With h districts for candidate 0 (the largest h), the j smallest of them are planted.
    auto flips_needed = [&](std::size_t h) { return districts_to_flip(h, k - h, false); };
    auto capacity = [&](std::size_t h) {
        std::uint64_t cap = 0;
        const std::size_t j = flips_needed(h);
        for (std::size_t i = 0; i < j; ++i) cap += detail::max_two_way_cost(sizes[k - h + i]);
        return cap;
    };

    const std::size_t h_min = k / 2 + (k % 2);
    std::optional<std::size_t> chosen;
    for (std::size_t h = std::max<std::size_t>(h_min, 1); h <= k; ++h)
        if (capacity(h) >= target && flips_needed(h) <= target) {
            chosen = h;
            break;
        }

    PlantedInstance out;
    out.tie = tie;
    out.target = target;
    std::vector<DistrictProfile> districts;
    if (!chosen) {
        out.saturated = true;
        for (auto n : sizes) districts.push_back(DistrictProfile::from_counts({n, 0}));
    } else {
        const std::size_t h = *chosen;
        const std::size_t j = flips_needed(h);
        std::vector<std::uint64_t> cost(j, 1);
        std::uint64_t rest = target - j;
        for (std::size_t i = 0; i < j && rest > 0; ++i) {
            const std::uint64_t add = std::min(rest, detail::max_two_way_cost(sizes[k - h + i]) - 1);
            cost[i] += add;
            rest -= add;
        }
        for (std::size_t i = 0; i < k; ++i) {
            const auto n = sizes[i];
            if (i < k - h) {
                districts.push_back(DistrictProfile::from_counts({0, n}));
            } else if (i < k - h + j) {
                const auto [a, b] = detail::counts_for_cost(n, cost[i - (k - h)]);
                districts.push_back(DistrictProfile::from_counts({a, b}));
            } else {
                districts.push_back(DistrictProfile::from_counts({n, 0}));
            }
        }
    }
    std::shuffle(districts.begin(), districts.end(), rng);
    out.election = Election::make(2, std::move(districts));
    out.achieved = election_mov_greedy_2cand(out.election, tie).value;
    return out;
}

/// Hard instance with exact MOV eps * N. The tie-break favors the challenger
/// (candidate 1), which the identity relies on.
struct LowerBoundInstance {
    Election election;
    TieBreak tie;
    std::uint64_t mov = 0;
};

/// (1/2 + 4 eps) k districts at (3n/4, n/4); the rest at (0, n).
inline LowerBoundInstance gen_lowerbound_districts(const Rational& epsilon, std::uint64_t n, std::uint64_t k) {
    if (epsilon <= 0 || epsilon >= Rational(1, 8)) throw ParameterError("epsilon must satisfy 0 < epsilon < 1/8");
    if (n == 0 || n % 4 != 0) throw ParameterError("n must be a positive multiple of 4");
    const Rational a = (Rational(1, 2) + 4 * epsilon) * k;
    if (denominator(a) != 1) throw ParameterError("(1/2 + 4 epsilon) k must be an integer");
    const auto a_count = static_cast<std::uint64_t>(numerator(a));
    std::vector<DistrictProfile> d;
    for (std::uint64_t i = 0; i < k; ++i)
        d.push_back(i < a_count ? DistrictProfile::from_counts({3 * n / 4, n / 4}) : DistrictProfile::from_counts({0, n}));
    LowerBoundInstance out{Election::make(2, std::move(d)), TieBreak({Candidate(1), Candidate(0)}), 0};
    out.mov = static_cast<std::uint64_t>(numerator(Rational(epsilon * n * k)));
    return out;
}

/// 11k/20 districts at ((1/2 + 20 eps) n, (1/2 - 20 eps) n); the rest all for candidate 1.
inline LowerBoundInstance gen_lowerbound_votes(const Rational& epsilon, std::uint64_t n, std::uint64_t k) {
    if (epsilon <= 0 || epsilon > Rational(1, 40)) throw ParameterError("epsilon must satisfy 0 < epsilon <= 1/40");
    if (k == 0 || k % 20 != 0) throw ParameterError("k must be a positive multiple of 20");
    if (n == 0 || n % 2 != 0) throw ParameterError("n must be a positive even number");
    const Rational lead = 20 * epsilon * n;
    if (denominator(lead) != 1) throw ParameterError("20 epsilon n must be an integer");
    const auto lead_votes = static_cast<std::uint64_t>(numerator(lead));
    const std::uint64_t a_count = 11 * k / 20;
    std::vector<DistrictProfile> d;
    for (std::uint64_t i = 0; i < k; ++i)
        d.push_back(i < a_count ? DistrictProfile::from_counts({n / 2 + lead_votes, n / 2 - lead_votes})
                                : DistrictProfile::from_counts({0, n}));
    LowerBoundInstance out{Election::make(2, std::move(d)), TieBreak({Candidate(1), Candidate(0)}), 0};
    out.mov = static_cast<std::uint64_t>(numerator(Rational(epsilon * n * k)));
    return out;
}

/// Ranking peaked at `peak`, extended one axis neighbor at a time by fair coin.
inline Ranking single_peaked_ranking(const HarmoniousOrder& order, Candidate peak, Rng& rng) {
    const auto pos = order.positions();
    const std::size_t m = order.size();
    std::size_t lo = pos.at(peak.idx());
    std::size_t hi = lo;
    Ranking r;
    r.order.push_back(peak);
    std::bernoulli_distribution coin(0.5);
    while (r.order.size() < m) {
        const bool can_left = lo > 0;
        const bool can_right = hi + 1 < m;
        if (can_left && (!can_right || coin(rng)))
            r.order.push_back(order.order[--lo]);
        else
            r.order.push_back(order.order[++hi]);
    }
    return r;
}

namespace detail {

inline Profile aggregate(const std::vector<Ranking>& rs) {
    std::map<std::vector<std::uint32_t>, std::uint64_t> tally;
    for (const auto& r : rs) {
        std::vector<std::uint32_t> key;
        for (auto c : r.order) key.push_back(c.index);
        tally[key]++;
    }
    Profile p;
    for (const auto& [key, mult] : tally) {
        Ranking r;
        for (auto c : key) r.order.emplace_back(c);
        p.push_back({std::move(r), mult});
    }
    return p;
}

}  // namespace detail

/// N single-peaked rankings; peaks drawn from `peak_weights` (uniform when empty).
/// Identical rankings are merged into blocks.
inline Profile gen_single_peaked(const HarmoniousOrder& order, std::uint64_t n, const std::vector<double>& peak_weights,
                                 Rng& rng) {
    if (n < 1) throw ParameterError("N must be >= 1");
    const std::size_t m = order.size();
    if (!peak_weights.empty() && peak_weights.size() != m) throw DimensionError("one peak weight per candidate");
    std::vector<double> w = peak_weights.empty() ? std::vector<double>(m, 1.0) : peak_weights;
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    std::vector<Ranking> rs;
    rs.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) rs.push_back(single_peaked_ranking(order, Candidate(pick(rng)), rng));
    return detail::aggregate(rs);
}

/// Single-peaked profile (along `order`) with top-choice counts `tops`.
inline Profile single_peaked_profile_for(const HarmoniousOrder& order, const std::vector<std::uint64_t>& tops, Rng& rng) {
    std::vector<Ranking> rs;
    for (std::size_t c = 0; c < tops.size(); ++c)
        for (std::uint64_t i = 0; i < tops[c]; ++i) rs.push_back(single_peaked_ranking(order, Candidate(c), rng));
    return detail::aggregate(rs);
}

/// Median-rule district of odd population n, single-peaked along `order`,
/// whose winner is the middle candidate of the axis and whose margin is
/// exactly `margin` (1 <= margin <= (n+1)/2).
inline DistrictProfile gen_median_district(const HarmoniousOrder& order, std::uint64_t n, std::uint64_t margin, Rng& rng) {
    const std::size_t m = order.size();
    if (m < 2) throw ParameterError("need at least 2 candidates");
    if (n % 2 == 0) throw ParameterError("median districts use an odd population");
    const std::uint64_t half_up = (n + 1) / 2;
    if (margin < 1 || margin > half_up) throw ParameterError("margin must lie in [1, (n+1)/2]");
    const std::size_t t = m / 2;
    // Left and right of the winner each hold half_up - margin votes.
    const std::uint64_t side = half_up - margin;
    std::vector<std::uint64_t> tops(m, 0);
    auto spread = [&](std::size_t from, std::size_t to, std::uint64_t votes) {
        if (from == to) return;
        std::uniform_int_distribution<std::size_t> pick(from, to - 1);
        for (std::uint64_t i = 0; i < votes; ++i) tops[order.order[pick(rng)].idx()]++;
    };
    spread(0, t, t == 0 ? 0 : side);
    spread(t + 1, m, t + 1 == m ? 0 : side);
    std::uint64_t used = std::accumulate(tops.begin(), tops.end(), std::uint64_t{0});
    tops[order.order[t].idx()] = n - used;
    DistrictProfile d = DistrictProfile::from_rankings(m, single_peaked_profile_for(order, tops, rng));
    d.order = order;
    return d;
}

/// Median-rule election of k districts, each with its own random axis on
/// which candidate 0 sits in the middle, each with per-district margin
/// `margin`. The exact election MOV is returned alongside.
struct PlantedMedian {
    Election election;
    std::uint64_t mov = 0;
};

inline PlantedMedian gen_planted_median(std::size_t m, std::size_t k, std::uint64_t n, std::uint64_t margin,
                                        std::uint64_t seed, bool with_mov = true) {
    Rng rng(seed);
    std::vector<DistrictProfile> ds;
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<Candidate> rest;
        for (std::size_t c = 1; c < m; ++c) rest.emplace_back(c);
        std::shuffle(rest.begin(), rest.end(), rng);
        HarmoniousOrder h;
        h.order.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(m / 2));
        h.order.push_back(Candidate(0));
        h.order.insert(h.order.end(), rest.begin() + static_cast<std::ptrdiff_t>(m / 2), rest.end());
        ds.push_back(gen_median_district(h, n, margin, rng));
    }
    PlantedMedian out;
    out.election = Election::make(m, std::move(ds));
    if (!with_mov) return out;
    const auto tie = TieBreak::ascending(m);
    BruteForceLimits lim{m, k, n};
    out.mov = election_mov_bruteforce(out.election, Rule::Median, tie, lim).value;
    return out;
}

/// Uniformly random top-choice counts, populations uniform in [n_min, n_max].
inline Election gen_random(std::size_t m, std::size_t k, std::uint64_t n_min, std::uint64_t n_max, Rng& rng) {
    if (m < 2 || k < 1 || n_min < 1 || n_min > n_max) throw ParameterError("invalid random election parameters");
    std::uniform_int_distribution<std::uint64_t> size(n_min, n_max);
    std::uniform_int_distribution<std::size_t> who(0, m - 1);
    std::vector<DistrictProfile> ds;
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::uint64_t> counts(m, 0);
        const auto n = size(rng);
        for (std::uint64_t i = 0; i < n; ++i) counts[who(rng)]++;
        ds.push_back(DistrictProfile::from_counts(std::move(counts)));
    }
    return Election::make(m, std::move(ds));
}

enum class Adversary { TiltTowardLoser, Random };

inline Adversary parse_adversary(std::string_view s) {
    if (s == "tilt") return Adversary::TiltTowardLoser;
    if (s == "random") return Adversary::Random;
    throw ParameterError("unknown adversary '" + std::string(s) + "'");
}

/// Weights over items labelled by candidate with total variation exactly
/// gamma from uniform. Tilt moves gamma of mass from `winner`'s items to
/// `loser`'s; Random moves it from a random donor set to a random recipient set.
inline std::vector<Rational> biased_weights(const std::vector<Candidate>& labels, const Rational& gamma, Adversary adv,
                                            Candidate winner, Candidate loser, Rng& rng) {
    const std::size_t n = labels.size();
    if (n == 0) throw ParameterError("no items to weight");
    if (gamma < 0 || gamma >= 1) throw ParameterError("gamma must satisfy 0 <= gamma < 1");
    const Rational u(1, static_cast<long long>(n));
    std::vector<Rational> w(n, u);
    if (gamma == 0) return w;
    if (adv == Adversary::TiltTowardLoser) {
        std::size_t gw = 0, gl = 0;
        for (auto c : labels) {
            gw += c == winner;
            gl += c == loser;
        }
        if (gl == 0) throw ParameterError("loser has no items to receive mass");
        if (gamma > Rational(static_cast<long long>(gw), static_cast<long long>(n)))
            throw ParameterError("gamma exceeds the winner's total mass");
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == winner) w[i] -= gamma / gw;
            if (labels[i] == loser) w[i] += gamma / gl;
        }
        return w;
    }
    const auto max_recv = static_cast<std::size_t>(floor_of((1 - gamma) * n));
    if (max_recv < 1) throw ParameterError("gamma too large for the number of items");
    std::uniform_int_distribution<std::size_t> size(1, max_recv);
    const std::size_t r = size(rng);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    const Rational gain = gamma / r;
    const Rational loss = gamma / (n - r);
    for (std::size_t i = 0; i < n; ++i) w[idx[i]] += i < r ? gain : -loss;
    return w;
}

/// Voter-level distribution for one district (voters grouped by top choice).
inline BiasedDistribution gen_biased_distribution(const DistrictProfile& d, const Rational& gamma, Adversary adv, Rng& rng,
                                                  std::optional<TieBreak> tie = std::nullopt) {
    const std::size_t m = d.top_counts.size();
    const TieBreak t = tie ? *tie : TieBreak::ascending(m);
    std::vector<Candidate> labels;
    labels.reserve(d.population);
    for (std::size_t c = 0; c < m; ++c) labels.insert(labels.end(), d.top_counts[c], Candidate(c));
    const Candidate w = plurality_winner(d.top_counts, t);
    std::vector<std::uint64_t> others = d.top_counts;
    others[w.idx()] = 0;
    std::vector<Candidate> prio;
    for (auto c : t.priority())
        if (c != w) prio.push_back(c);
    Candidate l = prio.front();
    for (auto c : prio)
        if (others[c.idx()] > others[l.idx()]) l = c;
    return make_voter_distribution(biased_weights(labels, gamma, adv, w, l, rng), gamma, d.top_counts);
}

/// District-level distribution: the overall winner's districts are the donors under tilt.
inline BiasedDistribution gen_biased_district_distribution(const Election& e, const Rational& gamma, Adversary adv,
                                                           Rng& rng, std::optional<TieBreak> tie = std::nullopt) {
    const TieBreak t = tie ? *tie : TieBreak::ascending(e.num_candidates);
    const auto outcome = district_election_winner(e, Rule::Plurality, t);
    const auto [w, l] = maj_and_secmaj(outcome.district_winners, t);
    auto weights = biased_weights(outcome.district_winners, gamma, adv, w, l, rng);
    return make_district_distribution(std::move(weights), gamma);
}

}  // namespace ballot
