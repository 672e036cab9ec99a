#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "ballot/election.hpp"
#include "ballot/errors.hpp"
#include "ballot/rules.hpp"

namespace ballot {

/// cost[x] = fewest top-choice reassignments inside one district after which x wins it.
struct DistrictFlipCost {
    std::vector<std::uint64_t> cost;
};

/// value = fewest altered votes that change the overall winner. witness[j] is
/// the winner district j is driven to (unchanged districts keep their winner).
struct MOVResult {
    std::uint64_t value = 0;
    std::vector<Candidate> witness;
};

inline std::uint64_t plurality_flip_cost(std::span<const std::uint64_t> counts, Candidate x, const TieBreak& tie) {
    check_tie_size(tie, counts.size());
    const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    const auto gx = static_cast<std::int64_t>(counts[x.idx()]);

    auto excess = [&](std::int64_t t) {
        std::int64_t sum = 0;
        for (std::size_t y = 0; y < counts.size(); ++y) {
            if (y == x.idx()) continue;
            const std::int64_t cap = gx + t - (tie.favors(Candidate(y), x) ? 1 : 0);
            sum += std::max<std::int64_t>(0, static_cast<std::int64_t>(counts[y]) - cap);
        }
        return sum;
    };

    std::int64_t lo = 0;
    std::int64_t hi = static_cast<std::int64_t>(total) - gx;
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (excess(mid) <= mid)
            hi = mid;
        else
            lo = mid + 1;
    }
    return static_cast<std::uint64_t>(lo);
}

inline std::uint64_t median_flip_cost(std::span<const std::uint64_t> counts, const HarmoniousOrder& order,
                                      Candidate x) {
    if (order.size() != counts.size()) throw DimensionError("harmonious order length differs from counts");
    const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    const std::uint64_t half_up = (total + 1) / 2;
    std::uint64_t left = 0;
    for (auto c : order.order) {
        if (c == x) break;
        left += counts[c.idx()];
    }
    const std::uint64_t right = left + counts[x.idx()];
    std::uint64_t cost = 0;
    if (left + 1 > half_up) cost += left + 1 - half_up;
    if (right < half_up) cost += half_up - right;
    return cost;
}

inline DistrictFlipCost district_flip_costs(const DistrictProfile& d, Rule rule, const TieBreak& tie,
                                            const HarmoniousOrder* order = nullptr) {
    DistrictFlipCost out;
    const std::size_t m = d.top_counts.size();
    out.cost.resize(m);
    if (rule == Rule::Median && order == nullptr)
        throw RuleInapplicable("median flip costs need a harmonious order");
    for (std::size_t x = 0; x < m; ++x)
        out.cost[x] = rule == Rule::Plurality ? plurality_flip_cost(d.top_counts, Candidate(x), tie)
                                              : median_flip_cost(d.top_counts, *order, Candidate(x));
    return out;
}

/// Counts after the cheapest reassignment that makes x the district winner.
inline std::vector<std::uint64_t> realize_flip(std::span<const std::uint64_t> counts, Candidate x, Rule rule,
                                               const TieBreak& tie, const HarmoniousOrder* order = nullptr) {
    std::vector<std::uint64_t> out(counts.begin(), counts.end());
    if (rule == Rule::Plurality) {
        std::uint64_t t = plurality_flip_cost(counts, x, tie);
        const std::uint64_t target = counts[x.idx()] + t;
        for (std::size_t y = 0; y < out.size() && t > 0; ++y) {
            if (y == x.idx()) continue;
            const std::uint64_t cap = target - (tie.favors(Candidate(y), x) ? 1 : 0);
            const std::uint64_t take = out[y] > cap ? std::min(t, out[y] - cap) : 0;
            out[y] -= take;
            t -= take;
        }
        for (std::size_t y = 0; y < out.size() && t > 0; ++y) {
            if (y == x.idx()) continue;
            const std::uint64_t take = std::min(t, out[y]);
            out[y] -= take;
            t -= take;
        }
        out[x.idx()] = target;
        return out;
    }
    if (order == nullptr) throw RuleInapplicable("median needs a harmonious order");
    const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    const std::uint64_t half_up = (total + 1) / 2;
    const auto pos = order->positions();
    std::uint64_t left = 0;
    for (auto c : order->order) {
        if (c == x) break;
        left += counts[c.idx()];
    }
    const std::uint64_t right = left + counts[x.idx()];
    std::uint64_t need = 0;
    bool from_left = false;
    if (left + 1 > half_up) {
        need = left + 1 - half_up;
        from_left = true;
    } else if (right < half_up) {
        need = half_up - right;
    }
    for (auto c : order->order) {
        if (need == 0) break;
        const bool is_left = pos[c.idx()] < pos[x.idx()];
        const bool is_right = pos[c.idx()] > pos[x.idx()];
        if ((from_left && is_left) || (!from_left && is_right)) {
            const std::uint64_t take = std::min(need, out[c.idx()]);
            out[c.idx()] -= take;
            out[x.idx()] += take;
            need -= take;
        }
    }
    return out;
}

/// Fewest reassignments that change the median winner of a single district.
inline std::uint64_t median_mov_prefix_gap(std::span<const std::uint64_t> counts, const HarmoniousOrder& order) {
    const Candidate w = median_winner(counts, order);
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t x = 0; x < counts.size(); ++x)
        if (Candidate(x) != w) best = std::min(best, median_flip_cost(counts, order, Candidate(x)));
    return best;
}

inline std::uint64_t median_mov_prefix_gap(const std::vector<std::uint64_t>& counts, const HarmoniousOrder& order) {
    return median_mov_prefix_gap(std::span<const std::uint64_t>(counts), order);
}

/// Flip-cost vectors of every district; the median rule uses each district's order.
inline std::vector<DistrictFlipCost> election_flip_costs(const Election& e, Rule rule, const TieBreak& tie) {
    std::vector<DistrictFlipCost> out;
    out.reserve(e.k());
    for (std::size_t j = 0; j < e.k(); ++j) out.push_back(district_flip_costs(e.districts[j], rule, tie, e.order_for(j)));
    return out;
}

/// Smallest j such that the loser, after taking j districts from the winner,
/// wins the district count.
inline std::size_t districts_to_flip(std::size_t f_winner, std::size_t f_loser, bool loser_wins_ties) {
    std::size_t j = 0;
    while (!(f_loser + j > f_winner - j || (loser_wins_ties && f_loser + j == f_winner - j))) ++j;
    return j;
}

/// Exact MOV for two candidates under plurality: flip the cheapest districts
/// of the winner until the loser holds the winning district count.
inline MOVResult election_mov_greedy_2cand(const Election& e, const TieBreak& tie) {
    if (e.num_candidates != 2) throw DimensionError("greedy MOV needs exactly 2 candidates");
    const auto outcome = district_election_winner(e, Rule::Plurality, tie);
    const Candidate w = outcome.winner;
    const Candidate l(1 - w.index);
    const auto f = frequencies(outcome.district_winners, 2);

    std::vector<std::pair<std::uint64_t, std::size_t>> won;
    for (std::size_t j = 0; j < e.k(); ++j)
        if (outcome.district_winners[j] == w) won.emplace_back(plurality_flip_cost(e.districts[j].top_counts, l, tie), j);
    std::sort(won.begin(), won.end());

    const std::size_t need = districts_to_flip(f[w.idx()], f[l.idx()], tie.favors(l, w));
    MOVResult r;
    r.witness = outcome.district_winners;
    for (std::size_t i = 0; i < need; ++i) {
        r.value += won[i].first;
        r.witness[won[i].second] = l;
    }
    return r;
}

struct BruteForceLimits {
    std::size_t max_candidates = 3;
    std::size_t max_districts = 8;
    std::uint64_t max_population = 12;
};

/// Exact MOV by enumerating all m^k per-district target winners.
inline MOVResult election_mov_bruteforce(const Election& e, Rule rule, const TieBreak& tie,
                                         const BruteForceLimits& limits = {}) {
    const std::size_t m = e.num_candidates;
    const std::size_t k = e.k();
    if (m > limits.max_candidates) throw SizeLimit("brute force: m exceeds " + std::to_string(limits.max_candidates));
    if (k > limits.max_districts) throw SizeLimit("brute force: k exceeds " + std::to_string(limits.max_districts));
    for (const auto& d : e.districts)
        if (d.population > limits.max_population)
            throw SizeLimit("brute force: district population exceeds " + std::to_string(limits.max_population));

    const auto costs = election_flip_costs(e, rule, tie);
    const Candidate w = district_election_winner(e, rule, tie).winner;

    std::vector<Candidate> assign(k, Candidate(0));
    MOVResult best;
    bool found = false;
    while (true) {
        std::uint64_t cost = 0;
        for (std::size_t j = 0; j < k; ++j) cost += costs[j].cost[assign[j].idx()];
        if ((!found || cost < best.value) && maj(assign, tie) != w) {
            best.value = cost;
            best.witness = assign;
            found = true;
        }
        std::size_t j = 0;
        while (j < k && assign[j].idx() + 1 == m) assign[j++] = Candidate(0);
        if (j == k) break;
        assign[j] = Candidate(assign[j].idx() + 1);
    }
    return best;
}

/// Election obtained by driving each district to witness[j] at minimum cost.
inline Election apply_witness(const Election& e, std::span<const Candidate> witness, Rule rule, const TieBreak& tie) {
    if (witness.size() != e.k()) throw DimensionError("witness length differs from k");
    Election out = e;
    for (std::size_t j = 0; j < e.k(); ++j) {
        auto& d = out.districts[j];
        d.top_counts = realize_flip(e.districts[j].top_counts, witness[j], rule, tie, e.order_for(j));
        d.rankings.reset();
    }
    return out;
}

/// Number of voters whose top choice differs between two elections of equal shape.
inline std::uint64_t altered_votes(const Election& a, const Election& b) {
    std::uint64_t moved = 0;
    for (std::size_t j = 0; j < a.k(); ++j)
        for (std::size_t x = 0; x < a.num_candidates; ++x) {
            const auto p = a.districts[j].top_counts[x];
            const auto q = b.districts[j].top_counts[x];
            if (q > p) moved += q - p;
        }
    return moved;
}

}  // namespace ballot
