#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ballot/ballot.hpp"
#include "ballot/cli.hpp"
#include "support.hpp"

using namespace ballot;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limit_s) {
        v.pass = false;
        v.detail += " (over time limit)";
    }
    if (!v.pass) ++failures;
    std::printf("[%s] %d %s: %s (%.2fs)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string str(std::uint64_t x) { return std::to_string(x); }

// 1. Greedy equals brute force on every multiset of two-candidate districts.
Verdict oracle_equivalence() {
    std::vector<std::vector<std::uint64_t>> kinds;
    for (std::uint64_t n = 1; n <= 6; ++n)
        for (std::uint64_t a = 0; a <= n; ++a) kinds.push_back({a, n - a});
    const std::vector<TieBreak> ties = {TieBreak::ascending(2), TieBreak({Candidate(1), Candidate(0)})};
    std::uint64_t checked = 0, bad = 0;
    for (std::size_t k = 1; k <= 5; ++k) {
        std::vector<std::size_t> pick(k, 0);
        while (true) {
            std::vector<DistrictProfile> ds;
            for (auto i : pick) ds.push_back(DistrictProfile::from_counts(kinds[i]));
            const Election e = Election::make(2, std::move(ds));
            for (const auto& t : ties) {
                ++checked;
                if (election_mov_greedy_2cand(e, t).value != election_mov_bruteforce(e, Rule::Plurality, t, {2, 5, 6}).value)
                    ++bad;
            }
            std::size_t j = k;
            while (j > 0 && pick[j - 1] + 1 == kinds.size()) --j;
            if (j == 0) break;
            ++pick[j - 1];
            for (std::size_t i = j; i < k; ++i) pick[i] = pick[j - 1];
        }
    }
    return {bad == 0, str(checked) + " elections, " + str(bad) + " disagreements"};
}

// 2. Median winner equals Condorcet winner on single-peaked odd-N profiles.
Verdict median_is_condorcet() {
    std::uint64_t checked = 0, bad = 0;
    for (std::size_t m = 2; m <= 4; ++m) {
        const auto shapes = ref::single_peaked_rankings(m);
        const HarmoniousOrder axis = HarmoniousOrder::identity(m);
        for (std::uint64_t n = 1; n <= 7; n += 2)
            ref::multisets(shapes.size(), n, [&](const ref::Counts& mult) {
                std::vector<Ranking> rs;
                std::vector<std::uint64_t> tops(m, 0);
                for (std::size_t s = 0; s < shapes.size(); ++s)
                    for (std::uint64_t c = 0; c < mult[s]; ++c) {
                        Ranking r;
                        for (auto x : shapes[s]) r.order.push_back(Candidate(x));
                        rs.push_back(r);
                        ++tops[shapes[s][0]];
                    }
                ++checked;
                const auto cw = condorcet_winner(pairwise_matrix(rs, m));
                if (!cw || *cw != median_winner(tops, axis)) ++bad;
            });
    }
    return {bad == 0, str(checked) + " profiles, " + str(bad) + " mismatches"};
}

// 3. Both lower-bound constructions have MOV exactly eps * N.
Verdict lower_bound_identities() {
    std::uint64_t checked = 0, bad = 0;
    for (auto [p, q] : {std::pair{1, 40}, {1, 20}, {1, 16}, {3, 40}, {1, 10}})
        for (std::uint64_t n : {4, 8, 16, 40})
            for (std::uint64_t k : {40, 80, 120}) {
                const Rational eps(p, q);
                if (denominator(Rational((Rational(1, 2) + 4 * eps) * k)) != 1) continue;
                const auto lb = gen_lowerbound_districts(eps, n, k);
                ++checked;
                if (Rational(election_mov_greedy_2cand(lb.election, lb.tie).value) != eps * lb.election.total_population ||
                    lb.mov != election_mov_greedy_2cand(lb.election, lb.tie).value)
                    ++bad;
            }
    for (auto [p, q] : {std::pair{1, 40}, {1, 80}, {1, 100}, {1, 200}})
        for (std::uint64_t n : {200, 400, 800})
            for (std::uint64_t k : {20, 40, 60}) {
                const Rational eps(p, q);
                if (denominator(Rational(20 * eps * n)) != 1) continue;
                const auto lb = gen_lowerbound_votes(eps, n, k);
                ++checked;
                if (Rational(election_mov_greedy_2cand(lb.election, lb.tie).value) != eps * lb.election.total_population ||
                    lb.mov != election_mov_greedy_2cand(lb.election, lb.tie).value)
                    ++bad;
            }
    return {bad == 0 && checked >= 20, str(checked) + " instances, " + str(bad) + " mismatches"};
}

// 4. f(w) - f(w') >= eps k / 3 whenever MOV >= eps N.
Verdict structural_lemma() {
    std::uint64_t checked = 0, bad = 0, drawn = 0;
    Rng rng(404);
    const std::vector<std::pair<long long, long long>> epss = {{1, 10}, {1, 5}, {3, 10}};
    for (std::size_t ei = 0; checked < 200 && drawn < 20000; ++drawn, ei = (ei + 1) % epss.size()) {
        const Rational eps(epss[ei].first, epss[ei].second);
        PlantSpec s;
        s.k = std::uniform_int_distribution<std::size_t>(10, 60)(rng);
        s.n = std::uniform_int_distribution<std::uint64_t>(5, 60)(rng);
        s.sizes = static_cast<SizeRule>(std::uniform_int_distribution<int>(0, 2)(rng));
        s.gamma = eps + Rational(std::uniform_int_distribution<long long>(0, 20)(rng), 100);
        if (s.gamma > Rational(1, 2)) s.gamma = Rational(1, 2);
        s.seed = rng();
        const auto inst = gen_planted_2cand(s);
        const auto& e = inst.election;
        if (Rational(inst.achieved) < eps * e.total_population) continue;
        const auto out = district_election_winner(e, Rule::Plurality, inst.tie);
        const auto f = frequencies(out.district_winners, 2);
        const auto w = out.winner.idx();
        const long long gap = static_cast<long long>(f[w]) - static_cast<long long>(f[1 - w]);
        ++checked;
        if (3 * Rational(gap) < eps * static_cast<long long>(e.k())) ++bad;
    }
    return {bad == 0 && checked == 200, str(checked) + " instances with MOV >= eps N, " + str(bad) + " violations"};
}

struct McCase {
    std::string label;
    ExperimentConfig config;
};

ExperimentConfig mc(Algorithm a, double eps, std::optional<double> margin, double scale) {
    ExperimentConfig c;
    c.algorithm = a;
    c.epsilon = eps;
    c.margin = margin;
    c.delta = 0.1;
    c.scale = scale;
    c.trials = 200;
    c.seed = 20240601;
    return c;
}

// 5. Success rates consistent with 1 - delta at reduced scale.
Verdict probabilistic_guarantees() {
    std::vector<McCase> cases;
    cases.push_back({"alg1", mc(Algorithm::Alg1, 0.2, 0.21, 0.05)});
    {
        auto c = mc(Algorithm::Alg3, 0.2, 0.21, 0.05);
        c.sizes = SizeRule::Capped;
        c.kappa = 4;
        cases.push_back({"alg3", c});
    }
    cases.push_back({"alg4", mc(Algorithm::Alg4, 0.2, 0.21, 0.05)});
    // Single-district budgets scaled by s certify accuracy eps / sqrt(s); the instance margin clears that.
    const double eff = 0.1 / std::sqrt(0.05) + 0.005;
    for (auto a : {Algorithm::MedianKnown, Algorithm::MedianUnknown}) {
        auto c = mc(a, 0.1, eff, 0.05);
        c.family = "single-peaked";
        c.m = 4;
        c.k = 1;
        c.n = 1001;
        cases.push_back({std::string(algorithm_name(a)), c});
    }
    {
        auto c = mc(Algorithm::NoisySingle, 0.1, eff, 0.05);
        c.k = 1;
        c.n = 1000;
        c.gamma = 0.02;
        cases.push_back({"noisy-single", c});
    }
    {
        auto c = mc(Algorithm::NoisyDistricts, 0.2, 0.21, 0.05);
        c.gamma = 0.01;
        c.adversary = Adversary::Random;
        cases.push_back({"noisy-districts", c});
    }
    Verdict v;
    for (const auto& mcase : cases) {
        const auto& c = mcase.config;
        const auto prep = prepare(c);
        if (c.family == "planted") {
            const auto mov = election_mov_greedy_2cand(prep.election, prep.tie).value;
            const double need = (prep.election.k() == 1 ? c.epsilon / std::sqrt(c.scale) : c.epsilon) *
                                static_cast<double>(prep.election.total_population);
            if (static_cast<double>(mov) < need) {
                v.pass = false;
                v.detail += mcase.label + " precondition unmet; ";
                continue;
            }
        }
        const auto s = mc_eval(c);
        const bool ok = consistent_with_guarantee(s.successes, s.trials, c.delta);
        v.pass = v.pass && ok;
        v.detail += mcase.label + " " + str(s.successes) + "/" + str(s.trials) + (ok ? "" : " REJECTED") + "; ";
    }
    return v;
}

// 6. Additive MOV estimate within eps N of the planted MOV.
Verdict mov_additive() {
    Verdict v;
    for (auto [p, q] : {std::pair{3, 20}, {1, 4}}) {
        PlantSpec s;
        s.k = 20;
        s.n = 100;
        s.kappa = 4;
        s.gamma = Rational(p, q);
        s.seed = 77;
        const auto inst = gen_planted_2cand(s);
        const auto& e = inst.election;
        const Rational eps = s.gamma;
        const Rational gamma_n = s.gamma * e.total_population;
        const double epsd = to_double(eps);
        std::size_t ok = 0;
        const std::size_t trials = 100;
        for (std::size_t t = 0; t < trials; ++t) {
            Rng rng(trial_seed(606, t));
            const auto est = estimate_mov_additive(e, epsd, 0.1, 4, rng, 0.05, inst.tie);
            const Rational err = est.value - gamma_n;
            ok += (err < 0 ? -err : err) <= eps * e.total_population;
        }
        const bool pass = !inst.saturated && consistent_with_guarantee(ok, trials, 0.1);
        v.pass = v.pass && pass;
        v.detail += "gamma=" + std::to_string(p) + "/" + std::to_string(q) + " " + str(ok) + "/" + str(trials) +
                    (pass ? "" : " REJECTED") + "; ";
    }
    return v;
}

// 7. Multiplicative wrapper with the exact oracle, and the threshold sequence.
Verdict mov_multiplicative() {
    std::uint64_t checked = 0, bad = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        PlantSpec s;
        s.k = 10 + seed % 30;
        s.n = 20 + 3 * (seed % 17);
        s.sizes = static_cast<SizeRule>(seed % 2);
        s.gamma = Rational(4 + static_cast<long long>(seed % 3), 40);
        s.seed = seed;
        const auto inst = gen_planted_2cand(s);
        const Rational mov = s.gamma * inst.election.total_population;
        if (inst.saturated || inst.achieved != inst.target) {
            ++bad;
            continue;
        }
        for (auto [p, q] : {std::pair{1, 4}, {1, 2}}) {
            const Rational eps(p, q);
            const auto est = estimate_mov_multiplicative(exact_additive_oracle(inst.election, inst.tie), to_double(eps), 0.1,
                                                         inst.election.total_population);
            ++checked;
            if (est.value < (1 - eps) * mov || est.value > (1 + eps) * mov) ++bad;
        }
    }
    std::uint64_t lambdas = 0, lbad = 0;
    for (auto [p, q] : {std::pair{1, 4}, {1, 2}, {1, 10}, {3, 10}})
        for (std::size_t i = 1; i <= 5; ++i) {
            const Rational eps(p, q);
            Rational pw(1);
            for (std::size_t t = 0; t < i; ++t) pw *= 1 + eps;
            ++lambdas;
            if (lambda(eps, i) != (1 / eps + 1) / pw) ++lbad;
        }
    return {bad == 0 && lbad == 0 && lambdas == 20,
            str(checked) + " estimates, " + str(bad) + " outside band; " + str(lambdas) + " thresholds, " + str(lbad) + " wrong"};
}

std::uint64_t closed_budget(double scale, double formula) {
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(scale * formula)));
}

// 8. Recorded draws equal the closed-form budgets.
Verdict ledger_exactness() {
    Rng params(808);
    std::uniform_real_distribution<double> ue(0.05, 0.45), ud(0.01, 0.3), us(0.0005, 0.05);
    PlantSpec s;
    s.k = 12;
    s.n = 30;
    s.gamma = Rational(1, 5);
    const auto inst = gen_planted_2cand(s);
    const HarmoniousOrder axis = HarmoniousOrder::identity(4);
    std::uint64_t checked = 0, bad = 0;
    for (int i = 0; i < 50; ++i) {
        const double eps = ue(params), delta = ud(params), scale = us(params);
        const double gamma = std::uniform_real_distribution<double>(0, 0.9 * eps)(params);
        Rng rng(params());

        const auto a1 = predict_plurality_known_mov(inst.election, eps, delta, rng, scale);
        const auto l1 = closed_budget(scale, 1024.0 / (3.0 * eps * eps) * std::log(4.0 / delta));
        const auto l2 = closed_budget(scale, 3.0 / ((eps / 8) * (eps / 8)) * std::log(2.0 / (eps / 32)));
        bad += !(a1.samples.districts_drawn == l1 && a1.samples.votes_drawn == l1 * l2);

        const auto md = gen_median_district(axis, 101, 20, rng);
        const auto lm = closed_budget(scale, 1.0 / (2 * eps * eps) * std::log(4.0 / delta));
        const auto known = predict_median_single(md, eps, delta, &axis, rng, scale);
        bad += known.samples.votes_drawn != lm;
        const auto unknown = predict_median_single(md, eps, delta, nullptr, rng, scale);
        bad += unknown.samples.votes_drawn != (lm % 2 ? lm : lm + 1);

        const auto& d0 = inst.election.districts[0];
        const auto bias = gen_biased_distribution(d0, rational_from_double(gamma), Adversary::Random, rng);
        const auto ns = predict_plurality_noisy_single(d0, eps, delta, &bias, rng, scale);
        const double g = to_double(bias.declared_tv);
        bad += ns.samples.votes_drawn != closed_budget(scale, 3.0 / ((eps - g) * (eps - g)) * std::log(2.0 / delta));
        checked += 4;
    }
    return {bad == 0, str(checked) + " runs over 50 settings, " + str(bad) + " mismatches"};
}

struct CliRun {
    int code;
    std::string out;
};

CliRun cli_run(const std::vector<std::string>& args) {
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    return {code, o.str()};
}

// 9. Every subcommand is byte-identical across runs and worker counts.
Verdict cli_determinism() {
    const std::string path = "acceptance_instance.json";
    const std::vector<std::vector<std::string>> commands = {
        {"generate", "--family", "planted", "--k", "12", "--n", "25", "--margin", "0.2", "--seed", "5", "--format", "json",
         "--out", path},
        {"generate", "--family", "single-peaked", "--m", "4", "--k", "3", "--n", "9", "--seed", "5"},
        {"predict", "--algorithm", "alg1", "--epsilon", "0.2", "--scale", "0.01", "--seed", "3", "--format", "json"},
        {"predict", "--algorithm", "alg3", "--margin", "0.2", "--scale", "0.05", "--seed", "3"},
        {"predict", "--algorithm", "median-unknown", "--family", "single-peaked", "--m", "3", "--k", "1", "--n", "51",
         "--epsilon", "0.2", "--seed", "3"},
        {"estimate-mov", "--regime", "additive", "--epsilon", "0.25", "--kappa", "4", "--scale", "0.01", "--seed", "4"},
        {"estimate-mov", "--regime", "multiplicative", "--oracle", "exact", "--epsilon", "0.5", "--in", path},
        {"estimate-mov", "--regime", "multiplicative", "--oracle", "sampling", "--epsilon", "0.5", "--scale", "0.001",
         "--k", "10", "--n", "20", "--margin", "0.2", "--seed", "4"},
        {"exact", "--in", path, "--format", "json"},
        {"mc", "--algorithm", "alg1", "--epsilon", "0.3", "--scale", "0.01", "--trials", "40", "--seed", "6"},
        {"mc", "--algorithm", "noisy-districts", "--epsilon", "0.3", "--gamma", "0.02", "--adversary", "random", "--scale",
         "0.002", "--trials", "20", "--seed", "6", "--format", "json"},
        {"sweep", "--algorithms", "alg1,alg4", "--epsilons", "0.2,0.3", "--scale", "0.005", "--trials", "10", "--seed", "7"},
    };
    std::uint64_t checked = 0;
    std::string bad;
    for (const auto& cmd : commands) {
        const auto a = cli_run(cmd);
        const auto b = cli_run(cmd);
        bool same = a.code == 0 && a.code == b.code && a.out == b.out;
        if (cmd[0] == "mc" || cmd[0] == "sweep") {
            auto w = cmd;
            w.insert(w.end(), {"--workers", "8"});
            const auto c = cli_run(w);
            same = same && c.code == 0 && c.out == a.out;
        }
        ++checked;
        if (!same) bad += cmd[0] + " ";
    }
    std::remove(path.c_str());
    return {bad.empty(), str(checked) + " commands" + (bad.empty() ? "" : ", differing: " + bad)};
}

}  // namespace

int main() {
    criterion(1, "greedy MOV equals brute force", 60, oracle_equivalence);
    criterion(2, "median equals Condorcet on single-peaked profiles", 60, median_is_condorcet);
    criterion(3, "lower-bound instances have MOV eps N", 10, lower_bound_identities);
    criterion(4, "district-count gap is at least eps k / 3", 60, structural_lemma);
    criterion(5, "predictor success rates", 300 * 7, probabilistic_guarantees);
    criterion(6, "additive MOV estimator", 300, mov_additive);
    criterion(7, "multiplicative MOV wrapper and thresholds", 30, mov_multiplicative);
    criterion(8, "sample ledger matches closed forms", 10, ledger_exactness);
    criterion(9, "CLI determinism", 60, cli_determinism);
    std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
