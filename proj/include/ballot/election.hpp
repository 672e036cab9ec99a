#pragma once

#include <algorithm>
#include <compare>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ballot/errors.hpp"

namespace ballot {

/// Index of a candidate in [0, m) of the owning election.
struct Candidate {
    std::uint32_t index = 0;

    constexpr Candidate() = default;
    template <std::integral I>
    constexpr explicit Candidate(I i) : index(static_cast<std::uint32_t>(i)) {}

    constexpr std::size_t idx() const { return index; }
    auto operator<=>(const Candidate&) const = default;
};

/// Complete preference order, most preferred first.
struct Ranking {
    std::vector<Candidate> order;

    Candidate top() const { return order.front(); }
    bool operator==(const Ranking&) const = default;
};

struct RankingBlock {
    Ranking ranking;
    std::uint64_t multiplicity = 1;

    bool operator==(const RankingBlock&) const = default;
};

/// Multiset of rankings stored as (ranking, multiplicity) blocks.
using Profile = std::vector<RankingBlock>;

/// Axis along which the median rule and single-peakedness are defined.
struct HarmoniousOrder {
    std::vector<Candidate> order;

    std::size_t size() const { return order.size(); }
    bool operator==(const HarmoniousOrder&) const = default;

    /// position[c] = place of candidate c along the axis.
    std::vector<std::size_t> positions() const {
        std::vector<std::size_t> pos(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) pos[order[i].idx()] = i;
        return pos;
    }

    static HarmoniousOrder identity(std::size_t m) {
        HarmoniousOrder h;
        for (std::size_t i = 0; i < m; ++i) h.order.emplace_back(i);
        return h;
    }
};

/// Fixed tie-breaking priority; earlier entries win ties.
class TieBreak {
public:
    TieBreak() = default;

    explicit TieBreak(std::vector<Candidate> priority) : priority_(std::move(priority)) {
        rank_.assign(priority_.size(), priority_.size());
        for (std::size_t i = 0; i < priority_.size(); ++i) {
            const auto c = priority_[i].idx();
            if (c >= priority_.size() || rank_[c] != priority_.size())
                throw InvariantViolation("tie-break priority is not a permutation");
            rank_[c] = i;
        }
    }

    static TieBreak ascending(std::size_t m) {
        std::vector<Candidate> p;
        for (std::size_t i = 0; i < m; ++i) p.emplace_back(i);
        return TieBreak(std::move(p));
    }

    std::size_t size() const { return priority_.size(); }
    const std::vector<Candidate>& priority() const { return priority_; }
    std::size_t rank(Candidate c) const { return rank_.at(c.idx()); }

    /// True when `a` beats `b` in a tie.
    bool favors(Candidate a, Candidate b) const { return rank_.at(a.idx()) < rank_.at(b.idx()); }

    bool operator==(const TieBreak&) const = default;

private:
    std::vector<Candidate> priority_;
    std::vector<std::size_t> rank_;
};

/// One district: population, top-choice tallies, optional full rankings and
/// optional district-specific harmonious order.
struct DistrictProfile {
    std::uint64_t population = 0;
    std::vector<std::uint64_t> top_counts;
    std::optional<Profile> rankings;
    std::optional<HarmoniousOrder> order;

    bool operator==(const DistrictProfile&) const = default;

    static DistrictProfile from_counts(std::vector<std::uint64_t> counts) {
        DistrictProfile d;
        d.population = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
        d.top_counts = std::move(counts);
        return d;
    }

    /// Builds top-counts and population from the ranking blocks.
    static DistrictProfile from_rankings(std::size_t m, Profile rankings) {
        DistrictProfile d;
        d.top_counts.assign(m, 0);
        for (const auto& b : rankings) {
            if (b.ranking.order.empty()) throw InvariantViolation("empty ranking");
            const auto top = b.ranking.top().idx();
            if (top >= m) throw InvariantViolation("ranking candidate out of range");
            d.top_counts[top] += b.multiplicity;
            d.population += b.multiplicity;
        }
        d.rankings = std::move(rankings);
        return d;
    }
};

struct Election {
    std::size_t num_candidates = 0;
    std::vector<DistrictProfile> districts;
    std::uint64_t total_population = 0;
    /// Election-wide harmonious order; a district's own order takes precedence.
    std::optional<HarmoniousOrder> order;

    std::size_t k() const { return districts.size(); }
    bool operator==(const Election&) const = default;

    static Election make(std::size_t m, std::vector<DistrictProfile> districts,
                         std::optional<HarmoniousOrder> order = std::nullopt) {
        Election e;
        e.num_candidates = m;
        e.districts = std::move(districts);
        for (const auto& d : e.districts) e.total_population += d.population;
        e.order = std::move(order);
        return e;
    }

    /// Order governing district j for the median rule, if any.
    const HarmoniousOrder* order_for(std::size_t j) const {
        if (districts.at(j).order) return &*districts[j].order;
        if (order) return &*order;
        return nullptr;
    }
};

inline bool is_permutation_of(std::span<const Candidate> perm, std::size_t m) {
    if (perm.size() != m) return false;
    std::vector<bool> seen(m, false);
    for (auto c : perm) {
        if (c.idx() >= m || seen[c.idx()]) return false;
        seen[c.idx()] = true;
    }
    return true;
}

/// Throws InvariantViolation naming the first failing check.
inline void validate(const Election& e) {
    auto fail = [](const std::string& what) { throw InvariantViolation(what); };
    const std::size_t m = e.num_candidates;
    if (m < 2) fail("num_candidates must be >= 2");
    if (e.districts.empty()) fail("election must have at least one district");
    if (e.order && !is_permutation_of(e.order->order, m))
        fail("election harmonious order is not a permutation of the candidates");

    std::uint64_t total = 0;
    for (std::size_t j = 0; j < e.districts.size(); ++j) {
        const auto& d = e.districts[j];
        const std::string where = "district " + std::to_string(j) + ": ";
        if (d.population < 1) fail(where + "population must be >= 1");
        if (d.top_counts.size() != m) fail(where + "top_counts length differs from num_candidates");
        const auto sum = std::accumulate(d.top_counts.begin(), d.top_counts.end(), std::uint64_t{0});
        if (sum != d.population) fail(where + "top_counts sum differs from population");
        if (d.order && !is_permutation_of(d.order->order, m))
            fail(where + "harmonious order is not a permutation of the candidates");
        if (d.rankings) {
            std::vector<std::uint64_t> tally(m, 0);
            std::uint64_t mult = 0;
            for (const auto& b : *d.rankings) {
                if (!is_permutation_of(b.ranking.order, m)) fail(where + "ranking is not a permutation");
                if (b.multiplicity < 1) fail(where + "ranking multiplicity must be >= 1");
                tally[b.ranking.top().idx()] += b.multiplicity;
                mult += b.multiplicity;
            }
            if (mult != d.population) fail(where + "ranking multiplicities do not sum to population");
            if (tally != d.top_counts) fail(where + "ranking top-choice tallies disagree with top_counts");
        }
        total += d.population;
    }
    if (total != e.total_population) fail("total_population differs from the sum of district populations");
}

/// A ranking is single-peaked along `order` iff every prefix of it occupies a
/// contiguous interval of the axis.
inline bool is_single_peaked(const Ranking& r, const HarmoniousOrder& order) {
    const auto pos = order.positions();
    if (r.order.size() != pos.size()) return false;
    std::size_t lo = pos[r.order.front().idx()];
    std::size_t hi = lo;
    for (std::size_t i = 1; i < r.order.size(); ++i) {
        const std::size_t p = pos[r.order[i].idx()];
        if (lo > 0 && p == lo - 1) {
            lo = p;
        } else if (p == hi + 1) {
            hi = p;
        } else {
            return false;
        }
    }
    return true;
}

inline bool is_single_peaked(std::span<const RankingBlock> profile, const HarmoniousOrder& order) {
    return std::all_of(profile.begin(), profile.end(),
                       [&](const RankingBlock& b) { return is_single_peaked(b.ranking, order); });
}

inline bool is_single_peaked(std::span<const Ranking> rankings, const HarmoniousOrder& order) {
    return std::all_of(rankings.begin(), rankings.end(),
                       [&](const Ranking& r) { return is_single_peaked(r, order); });
}

}  // namespace ballot
