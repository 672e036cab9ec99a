#include <iostream>

#include "ballot/ballot.hpp"

int main() {
    using namespace ballot;

    PlantSpec spec;
    spec.k = 40;
    spec.n = 200;
    spec.gamma = Rational(1, 5);
    spec.seed = 7;
    const PlantedInstance inst = gen_planted_2cand(spec);
    const Election& e = inst.election;

    const auto truth = district_election_winner(e, Rule::Plurality, inst.tie);
    const auto mov = election_mov_greedy_2cand(e, inst.tie);
    std::cout << "districts " << e.k() << ", voters " << e.total_population << "\n";
    std::cout << "winner " << truth.winner.index << ", exact MOV " << mov.value << "\n";

    Rng rng(11);
    PredictOptions opts;
    opts.tie = inst.tie;
    const auto p = predict_plurality_known_mov(e, 0.2, 0.1, rng, 0.02, opts);
    std::cout << "predicted " << p.winner.index << " from " << p.samples.votes_drawn << " votes in "
              << p.samples.districts_drawn << " districts\n";

    const auto est = estimate_mov_multiplicative(exact_additive_oracle(e, inst.tie), 0.25, 0.1, e.total_population);
    std::cout << "multiplicative MOV estimate " << to_double(est.value) << " after " << est.rounds << " rounds\n";
    return 0;
}
