#include <gtest/gtest.h>

#include "ballot/generators.hpp"
#include "ballot/oracles.hpp"
#include "support.hpp"

using namespace ballot;

namespace {

HarmoniousOrder axis(const std::vector<std::size_t>& xs) {
    HarmoniousOrder h;
    for (auto x : xs) h.order.emplace_back(x);
    return h;
}

Election two_cand(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& ds) {
    std::vector<DistrictProfile> v;
    for (auto [a, b] : ds) v.push_back(DistrictProfile::from_counts({a, b}));
    return Election::make(2, std::move(v));
}

}  // namespace

TEST(FlipCost, PluralityExamples) {
    EXPECT_EQ(plurality_flip_cost(std::vector<std::uint64_t>{7, 3}, Candidate(1), TieBreak::ascending(2)), 3u);
    const auto c = district_flip_costs(DistrictProfile::from_counts({4, 4}), Rule::Plurality, TieBreak::ascending(2));
    EXPECT_EQ(c.cost, (std::vector<std::uint64_t>{0, 1}));
}

TEST(FlipCost, PluralityMatchesEnumeration) {
    const std::vector<std::vector<std::size_t>> priorities = {{0, 1, 2}, {2, 1, 0}, {1, 0, 2}};
    for (const auto& pr : priorities) {
        TieBreak t({Candidate(pr[0]), Candidate(pr[1]), Candidate(pr[2])});
        for (std::uint64_t n = 1; n <= 7; ++n)
            ref::compositions(3, n, [&](const ref::Counts& c) {
                for (std::size_t x = 0; x < 3; ++x) {
                    const auto want = ref::flip_cost(c, x, [&](const ref::Counts& d) { return ref::plurality(d, pr); });
                    ASSERT_EQ(plurality_flip_cost(c, Candidate(x), t), want);
                    const auto after = realize_flip(c, Candidate(x), Rule::Plurality, t, nullptr);
                    EXPECT_EQ(ref::plurality(after, pr), x);
                    EXPECT_EQ(ref::moved(c, after), want);
                }
            });
    }
}

TEST(FlipCost, MedianExample) {
    const auto h = axis({0, 1, 2});
    const std::vector<std::uint64_t> c = {2, 1, 2};
    EXPECT_EQ(median_flip_cost(c, h, Candidate(1)), 0u);
    for (std::size_t x : {0, 2})
        EXPECT_EQ(median_flip_cost(c, h, Candidate(x)),
                  ref::flip_cost(c, x, [&](const ref::Counts& d) { return ref::median(d, {0, 1, 2}); }));
}

TEST(FlipCost, MedianMatchesEnumeration) {
    const std::vector<std::size_t> ax = {1, 3, 0, 2};
    const auto h = axis(ax);
    for (std::uint64_t n = 1; n <= 8; ++n)
        ref::compositions(4, n, [&](const ref::Counts& c) {
            for (std::size_t x = 0; x < 4; ++x) {
                const auto want = ref::flip_cost(c, x, [&](const ref::Counts& d) { return ref::median(d, ax); });
                ASSERT_EQ(median_flip_cost(c, h, Candidate(x)), want);
                const auto after = realize_flip(c, Candidate(x), Rule::Median, TieBreak::ascending(4), &h);
                EXPECT_EQ(ref::median(after, ax), x);
                EXPECT_EQ(ref::moved(c, after), want);
            }
        });
}

TEST(PrefixGap, Examples) {
    EXPECT_EQ(median_mov_prefix_gap({2, 1, 2}, axis({0, 1, 2})), 1u);
    for (std::uint64_t n = 1; n <= 9; ++n) {
        const std::vector<std::uint64_t> mid = {0, n, 0};
        std::uint64_t want = UINT64_MAX;
        for (std::size_t x : {0, 2})
            want = std::min(want, ref::flip_cost(mid, x, [](const ref::Counts& d) { return ref::median(d, {0, 1, 2}); }));
        EXPECT_EQ(median_mov_prefix_gap(mid, axis({0, 1, 2})), want) << n;
    }
}

TEST(PrefixGap, MatchesEnumeration) {
    const std::vector<std::size_t> ax = {2, 0, 1};
    for (std::uint64_t n = 1; n <= 9; ++n)
        ref::compositions(3, n, [&](const ref::Counts& c) {
            const auto w = ref::median(c, ax);
            std::uint64_t want = UINT64_MAX;
            for (std::size_t x = 0; x < 3; ++x)
                if (x != w) want = std::min(want, ref::flip_cost(c, x, [&](const ref::Counts& d) { return ref::median(d, ax); }));
            EXPECT_EQ(median_mov_prefix_gap(c, axis(ax)), want);
        });
}

TEST(ElectionMov, GreedyExample) {
    const Election e = two_cand({{4, 1}, {3, 2}, {1, 4}});
    const auto t = TieBreak::ascending(2);
    const auto g = election_mov_greedy_2cand(e, t);
    EXPECT_EQ(g.value, 1u);
    EXPECT_EQ(g.witness[1], Candidate(1));
    EXPECT_EQ(election_mov_bruteforce(e, Rule::Plurality, t).value, 1u);
    const Election after = apply_witness(e, g.witness, Rule::Plurality, t);
    EXPECT_EQ(altered_votes(e, after), 1u);
    EXPECT_EQ(district_election_winner(after, Rule::Plurality, t).winner, Candidate(1));
}

TEST(ElectionMov, SingleDistrictEqualsFlipCost) {
    const Election e = two_cand({{7, 3}});
    const auto t = TieBreak::ascending(2);
    EXPECT_EQ(election_mov_greedy_2cand(e, t).value, 3u);
    EXPECT_EQ(election_mov_bruteforce(e, Rule::Plurality, t).value, 3u);
}

TEST(ElectionMov, TiedInstanceNeedsOneVote) {
    const Election e = two_cand({{2, 2}, {3, 0}, {0, 3}});
    EXPECT_EQ(election_mov_bruteforce(e, Rule::Plurality, TieBreak::ascending(2)).value, 1u);
}

TEST(ElectionMov, GreedyAndBruteForceMatchFullEnumeration) {
    Rng rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = 1 + trial % 4;
        Election e = gen_random(2, k, 1, 5, rng);
        const bool flip_ties = trial % 2;
        const TieBreak t = flip_ties ? TieBreak({Candidate(1), Candidate(0)}) : TieBreak::ascending(2);
        const std::vector<std::size_t> pr = flip_ties ? std::vector<std::size_t>{1, 0} : std::vector<std::size_t>{0, 1};
        std::vector<ref::Counts> ds;
        for (const auto& d : e.districts) ds.push_back(d.top_counts);
        const auto want = ref::mov_full_enumeration(ds, 2, pr, [&](std::size_t, const ref::Counts& c) { return ref::plurality(c, pr); });
        ASSERT_EQ(election_mov_greedy_2cand(e, t).value, want);
        ASSERT_EQ(election_mov_bruteforce(e, Rule::Plurality, t).value, want);
    }
}

TEST(ElectionMov, BruteForceThreeCandidatesMatchesFullEnumeration) {
    Rng rng(7);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t k = 1 + trial % 3;
        Election e = gen_random(3, k, 1, 4, rng);
        std::vector<ref::Counts> ds;
        for (const auto& d : e.districts) ds.push_back(d.top_counts);
        const auto pr = ref::ascending(3);
        const auto want = ref::mov_full_enumeration(ds, 3, pr, [&](std::size_t, const ref::Counts& c) { return ref::plurality(c, pr); });
        ASSERT_EQ(election_mov_bruteforce(e, Rule::Plurality, TieBreak::ascending(3)).value, want);
    }
}

TEST(ElectionMov, MedianBruteForceMatchesFullEnumeration) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto pm = gen_planted_median(3, 1 + seed % 3, 5, 1 + seed % 3, seed);
        std::vector<ref::Counts> ds;
        std::vector<std::vector<std::size_t>> axes;
        for (std::size_t j = 0; j < pm.election.k(); ++j) {
            ds.push_back(pm.election.districts[j].top_counts);
            std::vector<std::size_t> ax;
            for (auto c : pm.election.order_for(j)->order) ax.push_back(c.idx());
            axes.push_back(ax);
        }
        const auto want = ref::mov_full_enumeration(ds, 3, ref::ascending(3),
                                                    [&](std::size_t j, const ref::Counts& c) { return ref::median(c, axes[j]); });
        EXPECT_EQ(pm.mov, want) << seed;
    }
}

TEST(ElectionMov, Limits) {
    Rng rng(1);
    const Election big = gen_random(2, 9, 1, 3, rng);
    EXPECT_THROW(election_mov_bruteforce(big, Rule::Plurality, TieBreak::ascending(2)), SizeLimit);
    EXPECT_NO_THROW(election_mov_bruteforce(big, Rule::Plurality, TieBreak::ascending(2), {2, 9, 3}));
    const Election three = gen_random(3, 2, 1, 3, rng);
    EXPECT_THROW(election_mov_greedy_2cand(three, TieBreak::ascending(3)), DimensionError);
}
