#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ballot/election.hpp"
#include "ballot/errors.hpp"

namespace ballot {

enum class Rule { Plurality, Median };

inline void check_tie_size(const TieBreak& tie, std::size_t m) {
    if (tie.size() != m)
        throw DimensionError("tie-break covers " + std::to_string(tie.size()) + " candidates, expected " +
                             std::to_string(m));
}

/// Argmax of `counts`; equal counts go to the candidate `tie` favors.
template <class T>
Candidate plurality_winner(std::span<const T> counts, const TieBreak& tie) {
    check_tie_size(tie, counts.size());
    std::size_t best = tie.priority().front().idx();
    for (auto c : tie.priority())
        if (counts[c.idx()] > counts[best]) best = c.idx();
    return Candidate(best);
}

inline Candidate plurality_winner(const std::vector<std::uint64_t>& counts, const TieBreak& tie) {
    return plurality_winner(std::span<const std::uint64_t>(counts), tie);
}

/// First candidate along `order` whose prefix sum reaches half the voters.
inline Candidate median_winner(std::span<const std::uint64_t> counts, const HarmoniousOrder& order) {
    if (order.size() != counts.size()) throw DimensionError("harmonious order length differs from counts");
    std::uint64_t total = 0;
    for (auto g : counts) total += g;
    std::uint64_t prefix = 0;
    for (auto c : order.order) {
        prefix += counts[c.idx()];
        if (2 * prefix >= total) return c;
    }
    return order.order.back();
}

inline Candidate median_winner(const std::vector<std::uint64_t>& counts, const HarmoniousOrder& order) {
    return median_winner(std::span<const std::uint64_t>(counts), order);
}

/// at(x, y) = number of voters ranking x above y.
class PairwiseMatrix {
public:
    explicit PairwiseMatrix(std::size_t m) : m_(m), counts_(m * m, 0) {}

    std::size_t size() const { return m_; }
    std::uint64_t at(Candidate x, Candidate y) const { return counts_[x.idx() * m_ + y.idx()]; }
    std::uint64_t& at(Candidate x, Candidate y) { return counts_[x.idx() * m_ + y.idx()]; }

    /// at(x, y) - at(y, x).
    std::int64_t margin(Candidate x, Candidate y) const {
        return static_cast<std::int64_t>(at(x, y)) - static_cast<std::int64_t>(at(y, x));
    }

    bool operator==(const PairwiseMatrix&) const = default;

private:
    std::size_t m_;
    std::vector<std::uint64_t> counts_;
};

inline void add_ranking(PairwiseMatrix& p, const Ranking& r, std::uint64_t mult) {
    const auto& o = r.order;
    for (std::size_t i = 0; i < o.size(); ++i)
        for (std::size_t j = i + 1; j < o.size(); ++j) p.at(o[i], o[j]) += mult;
}

inline PairwiseMatrix pairwise_matrix(std::span<const RankingBlock> profile, std::size_t m) {
    PairwiseMatrix p(m);
    for (const auto& b : profile) add_ranking(p, b.ranking, b.multiplicity);
    return p;
}

inline PairwiseMatrix pairwise_matrix(std::span<const Ranking> rankings, std::size_t m) {
    PairwiseMatrix p(m);
    for (const auto& r : rankings) add_ranking(p, r, 1);
    return p;
}

/// The candidate beating every other in strict pairwise majority, if one exists.
inline std::optional<Candidate> condorcet_winner(const PairwiseMatrix& p) {
    for (std::size_t x = 0; x < p.size(); ++x) {
        bool beats_all = true;
        for (std::size_t y = 0; y < p.size() && beats_all; ++y)
            if (x != y && p.margin(Candidate(x), Candidate(y)) <= 0) beats_all = false;
        if (beats_all) return Candidate(x);
    }
    return std::nullopt;
}

/// Candidate maximizing its worst pairwise margin; ties by `tie`.
inline Candidate maximin_winner(const PairwiseMatrix& p, const TieBreak& tie) {
    check_tie_size(tie, p.size());
    std::optional<Candidate> best;
    std::int64_t best_score = 0;
    for (auto x : tie.priority()) {
        std::int64_t worst = std::numeric_limits<std::int64_t>::max();
        for (std::size_t y = 0; y < p.size(); ++y)
            if (y != x.idx()) worst = std::min(worst, p.margin(x, Candidate(y)));
        if (!best || worst > best_score) {
            best = x;
            best_score = worst;
        }
    }
    return *best;
}

/// Number of districts won by each candidate.
inline std::vector<std::size_t> frequencies(std::span<const Candidate> winners, std::size_t m) {
    std::vector<std::size_t> f(m, 0);
    for (auto c : winners) f.at(c.idx())++;
    return f;
}

/// (most frequent, second most frequent) candidate; frequency ties follow `tie`.
inline std::pair<Candidate, Candidate> maj_and_secmaj(std::span<const Candidate> winners, const TieBreak& tie) {
    if (winners.empty()) throw ParameterError("maj_and_secmaj on an empty list");
    if (tie.size() < 2) throw DimensionError("maj_and_secmaj needs at least two candidates");
    const auto f = frequencies(winners, tie.size());
    std::vector<Candidate> order = tie.priority();
    std::stable_sort(order.begin(), order.end(), [&](Candidate a, Candidate b) { return f[a.idx()] > f[b.idx()]; });
    return {order[0], order[1]};
}

inline Candidate maj(std::span<const Candidate> winners, const TieBreak& tie) {
    return maj_and_secmaj(winners, tie).first;
}

/// Winner of district j under `rule`. For the median rule the district's own
/// order is used, else the election-wide order, else the Condorcet winner of
/// the district's rankings.
inline Candidate district_winner(const Election& e, std::size_t j, Rule rule, const TieBreak& tie) {
    const auto& d = e.districts.at(j);
    if (rule == Rule::Plurality) return plurality_winner(d.top_counts, tie);
    if (const auto* order = e.order_for(j)) return median_winner(d.top_counts, *order);
    if (d.rankings) {
        if (auto c = condorcet_winner(pairwise_matrix(*d.rankings, e.num_candidates))) return *c;
        throw RuleInapplicable("district " + std::to_string(j) + ": no harmonious order and no Condorcet winner");
    }
    throw RuleInapplicable("district " + std::to_string(j) + ": median rule needs a harmonious order or rankings");
}

struct DistrictOutcome {
    Candidate winner;
    std::vector<Candidate> district_winners;
};

inline DistrictOutcome district_election_winner(const Election& e, Rule rule, const TieBreak& tie) {
    DistrictOutcome out;
    out.district_winners.reserve(e.k());
    for (std::size_t j = 0; j < e.k(); ++j) out.district_winners.push_back(district_winner(e, j, rule, tie));
    out.winner = maj(out.district_winners, tie);
    return out;
}

}  // namespace ballot
