#pragma once

// Independent reference implementations used only by the tests. They work
// from definitions by exhaustive enumeration and share no code with the
// library beyond the data types.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ballot/election.hpp"

namespace ref {

using ballot::Candidate;
using Counts = std::vector<std::uint64_t>;

inline std::string fixture(const std::string& name) { return std::string(BALLOT_FIXTURES) + "/" + name; }

/// Winner by definition: highest count, ties to the earliest entry of `priority`.
inline std::size_t plurality(const Counts& c, const std::vector<std::size_t>& priority) {
    std::size_t best = priority[0];
    for (auto x : priority)
        if (c[x] > c[best]) best = x;
    return best;
}

inline std::vector<std::size_t> ascending(std::size_t m) {
    std::vector<std::size_t> p(m);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

/// Smallest candidate along `axis` whose cumulative count reaches half of N.
inline std::size_t median(const Counts& c, const std::vector<std::size_t>& axis) {
    const std::uint64_t n = std::accumulate(c.begin(), c.end(), std::uint64_t{0});
    std::uint64_t run = 0;
    for (auto x : axis) {
        run += c[x];
        if (2 * run >= n) return x;
    }
    return axis.back();
}

/// Every vector of m non-negative integers summing to n.
inline void compositions(std::size_t m, std::uint64_t n, const std::function<void(const Counts&)>& f) {
    Counts c(m, 0);
    std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t i, std::uint64_t left) {
        if (i + 1 == m) {
            c[i] = left;
            f(c);
            return;
        }
        for (std::uint64_t v = 0; v <= left; ++v) {
            c[i] = v;
            rec(i + 1, left - v);
        }
    };
    rec(0, n);
}

/// Voters whose top choice differs between two tallies of equal size.
inline std::uint64_t moved(const Counts& a, const Counts& b) {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (b[i] > a[i]) s += b[i] - a[i];
    return s;
}

/// Fewest reassignments after which `winner_of` returns x, by enumerating every tally.
inline std::uint64_t flip_cost(const Counts& c, std::size_t x, const std::function<std::size_t(const Counts&)>& winner_of) {
    const std::uint64_t n = std::accumulate(c.begin(), c.end(), std::uint64_t{0});
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    compositions(c.size(), n, [&](const Counts& d) {
        if (winner_of(d) == x) best = std::min(best, moved(c, d));
    });
    return best;
}

/// Overall winner from district winners: most districts, ties by priority.
inline std::size_t majority(const std::vector<std::size_t>& winners, std::size_t m, const std::vector<std::size_t>& priority) {
    Counts f(m, 0);
    for (auto w : winners) f[w]++;
    return plurality(f, priority);
}

/// Exact MOV by enumerating every tally of every district (tiny instances only).
inline std::uint64_t mov_full_enumeration(const std::vector<Counts>& districts, std::size_t m,
                                          const std::vector<std::size_t>& priority,
                                          const std::function<std::size_t(std::size_t j, const Counts&)>& district_rule) {
    std::vector<std::size_t> w0;
    for (std::size_t j = 0; j < districts.size(); ++j) w0.push_back(district_rule(j, districts[j]));
    const std::size_t truth = majority(w0, m, priority);

    // Cheapest cost for each (district, winner) pair, then all combinations.
    std::vector<std::vector<std::uint64_t>> cost(districts.size(),
                                                 std::vector<std::uint64_t>(m, std::numeric_limits<std::uint64_t>::max()));
    for (std::size_t j = 0; j < districts.size(); ++j) {
        const std::uint64_t n = std::accumulate(districts[j].begin(), districts[j].end(), std::uint64_t{0});
        compositions(m, n, [&](const Counts& d) {
            auto& slot = cost[j][district_rule(j, d)];
            slot = std::min(slot, moved(districts[j], d));
        });
    }
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::size_t> pick(districts.size(), 0);
    std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t j, std::uint64_t acc) {
        if (acc >= best) return;
        if (j == districts.size()) {
            if (majority(pick, m, priority) != truth) best = acc;
            return;
        }
        for (std::size_t x = 0; x < m; ++x) {
            if (cost[j][x] == std::numeric_limits<std::uint64_t>::max()) continue;
            pick[j] = x;
            rec(j + 1, acc + cost[j][x]);
        }
    };
    rec(0, 0);
    return best;
}

/// Pairwise count: voters ranking a above b.
inline std::uint64_t prefer(const std::vector<std::pair<std::vector<std::size_t>, std::uint64_t>>& profile, std::size_t a,
                            std::size_t b) {
    std::uint64_t s = 0;
    for (const auto& [r, mult] : profile) {
        const auto pa = std::find(r.begin(), r.end(), a) - r.begin();
        const auto pb = std::find(r.begin(), r.end(), b) - r.begin();
        if (pa < pb) s += mult;
    }
    return s;
}

/// All rankings of m candidates that are single-peaked along the identity axis.
inline std::vector<std::vector<std::size_t>> single_peaked_rankings(std::size_t m) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> r(m);
    std::iota(r.begin(), r.end(), 0);
    do {
        // Preference strictly falls when walking away from the peak on either side.
        std::vector<std::size_t> place(m);
        for (std::size_t i = 0; i < m; ++i) place[r[i]] = i;
        const std::size_t peak = r[0];
        bool ok = true;
        for (std::size_t a = 0; a + 1 <= peak && ok; ++a) ok = place[a] > place[a + 1];
        for (std::size_t a = peak; a + 1 < m && ok; ++a) ok = place[a] < place[a + 1];
        if (ok) out.push_back(r);
    } while (std::next_permutation(r.begin(), r.end()));
    return out;
}

/// Every multiset of size n over `kinds` item types, as multiplicity vectors.
inline void multisets(std::size_t kinds, std::uint64_t n, const std::function<void(const Counts&)>& f) {
    compositions(kinds, n, f);
}

}  // namespace ref
