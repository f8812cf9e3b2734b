#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "auctionrl/eval.hpp"
#include "auctionrl/experiments.hpp"
#include "auctionrl/strategies.hpp"

using namespace auctionrl;

namespace {
const AuctionSettings kSplit2 = make_experiment(ExperimentId::SplitTruthful2).settings;
const AuctionSettings kSplit3 = make_experiment(ExperimentId::SplitEquilibrium3).settings;
}  // namespace

TEST_CASE("sequential equilibrium bids") {
    CHECK(seq_equilibrium_bid(1.0, 1, 2, 1, PriceRule::FirstPrice) == Catch::Approx(0.5));
    CHECK(seq_equilibrium_bid(0.6, 1, 2, 1, PriceRule::SecondPrice) == Catch::Approx(0.6));
    CHECK(seq_equilibrium_bid(0.9, 2, 3, 2, PriceRule::FirstPrice) == Catch::Approx(0.45));
    CHECK_THROWS_AS(seq_equilibrium_bid(0.5, 3, 3, 2, PriceRule::FirstPrice),
                    std::invalid_argument);
}

TEST_CASE("best response to truthful sequential opponents") {
    Observation o;
    o.own_type = 0.9;
    o.round = 0;
    CHECK(seq_best_response_truthful(o, PriceRule::SecondPrice, 2) == 0.0);

    o.round = 1;
    o.revealed_prices = {0.5};
    CHECK(seq_best_response_truthful(o, PriceRule::SecondPrice, 2) == Catch::Approx(0.5));

    o.own_type = 0.6;
    o.revealed_prices = {0.8};
    CHECK(seq_best_response_truthful(o, PriceRule::FirstPrice, 2) == Catch::Approx(0.3));
}

TEST_CASE("split equilibrium closed forms at n=3") {
    auto [f1, l1] = split_equilibrium_closed_form_n3(1.0, 0.2);
    CHECK(f1 == Catch::Approx(1.0 / 3.0));
    CHECK(l1 == Catch::Approx(0.3));
    auto [f2, l2] = split_equilibrium_closed_form_n3(2.0, 0.2);
    CHECK(f2 == Catch::Approx(0.4));
    CHECK(l2 == Catch::Approx(0.4));
    CHECK_THROWS_AS(split_equilibrium_closed_form_n3(0.5, 0.2), std::invalid_argument);
}

TEST_CASE("quadrature equilibrium matches the closed forms") {
    double max_dev = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double theta = 1.0 + (1.0 - 1e-6) * i / 99.0;
        const auto [cf, cl] = split_equilibrium_closed_form_n3(theta, 0.2);
        max_dev = std::max(max_dev,
                           std::abs(split::first_round_bid(theta, kSplit3) - cf));
        max_dev = std::max(
            max_dev, std::abs(split::second_round_loser_bid(theta, kSplit3) - cl));
    }
    CHECK(max_dev < 1e-8);
}

TEST_CASE("split equilibrium bid roles") {
    CHECK(split_equilibrium_bid(1.0, SplitRole::FirstRound, kSplit3).split ==
          Catch::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(split_equilibrium_bid(1.5, SplitRole::SecondRoundLoser, kSplit3).split ==
          Catch::Approx(0.35).epsilon(1e-9));
    CHECK(split_equilibrium_bid(2.0, SplitRole::SecondRoundWinner, kSplit3).split ==
          Catch::Approx(1.6));
}

TEST_CASE("split best response to a truthful opponent") {
    Observation o;
    o.own_type = 1.0;
    o.round = 0;
    const auto r1 = split_best_response_truthful(o, kSplit2);
    CHECK(r1.split >= 0.4);
    CHECK(r1.sole >= 0.8);

    o.round = 1;
    o.revealed_prices = {0.3};
    CHECK(split_best_response_truthful(o, kSplit2).split == Catch::Approx(1.2));

    Observation bad;
    bad.round = 1;
    CHECK_THROWS_AS(split_best_response_truthful(bad, kSplit2), std::logic_error);
}

TEST_CASE("truthful bids") {
    CHECK(truthful_split_bid(1.5, 0, false, kSplit2).sole == Catch::Approx(1.5));
    CHECK(truthful_split_bid(1.5, 0, false, kSplit2).split == Catch::Approx(0.3));
    CHECK(truthful_split_bid(1.5, 1, false, kSplit2).split == Catch::Approx(0.3));
    CHECK(truthful_split_bid(1.5, 1, true, kSplit2).split == Catch::Approx(1.2));
    Observation o;
    o.own_type = 0.7;
    o.round = 0;
    auto seq = make_experiment(ExperimentId::Seq1FP2).settings;
    CHECK(seq_opponent_bid(StrategyKind::Truthful, o, seq) == Catch::Approx(0.7));
}

TEST_CASE("oracle expected utilities match the published values") {
    const auto seq1fp = make_experiment(ExperimentId::Seq1FP2).settings;
    const auto seq1sp = make_experiment(ExperimentId::Seq1SP2).settings;
    const auto seq2t = make_experiment(ExperimentId::Seq2FPTruthful3).settings;
    const auto seq2e = make_experiment(ExperimentId::Seq2FPEquilibrium3).settings;
    CHECK(oracle_expected_utility(ExperimentId::Seq1FP2, seq1fp) ==
          Catch::Approx(1.0 / 6.0).epsilon(1e-9));
    CHECK(oracle_expected_utility(ExperimentId::Seq1SP2, seq1sp) ==
          Catch::Approx(1.0 / 6.0).epsilon(1e-9));
    CHECK(oracle_expected_utility(ExperimentId::Seq2FPTruthful3, seq2t) ==
          Catch::Approx(7.0 / 48.0).epsilon(1e-9));
    CHECK(oracle_expected_utility(ExperimentId::Seq2FPTruthful3, seq2t) ==
          Catch::Approx(0.1458).margin(5e-5));
    CHECK(oracle_expected_utility(ExperimentId::Seq2FPEquilibrium3, seq2e) ==
          Catch::Approx(0.25).epsilon(1e-9));
    CHECK(oracle_expected_utility(ExperimentId::SplitTruthful2, kSplit2) ==
          Catch::Approx(0.9).epsilon(1e-9));
    CHECK(oracle_expected_utility(ExperimentId::SplitEquilibrium3, kSplit3) ==
          Catch::Approx(0.05).epsilon(1e-7));
}

TEST_CASE("oracle value function examples") {
    Observation o;
    o.own_type = 1.0;
    o.round = 1;
    o.revealed_prices = {0.3};  // truthful opponent of type 1.5
    CHECK(oracle_value_function(ExperimentId::SplitTruthful2, o, kSplit2) ==
          Catch::Approx(1.0));

    Observation sp;
    sp.own_type = 0.7;
    sp.round = 0;
    const auto seq1sp = make_experiment(ExperimentId::Seq1SP2).settings;
    CHECK(oracle_value_function(ExperimentId::Seq1SP2, sp, seq1sp) ==
          Catch::Approx(0.7 * 0.7 / 2.0));

    CHECK(oracle_value_function(ExperimentId::Seq1SP2, Observation::terminal_marker(),
                                seq1sp) == 0.0);
}

TEST_CASE("equilibrium bids are nondecreasing in type") {
    auto nondecreasing = [](auto&& f, double lo, double hi) {
        double prev = f(lo);
        for (int i = 1; i < 1000; ++i) {
            const double theta = lo + (hi - lo) * i / 999.0;
            const double v = f(theta);
            if (v + 1e-12 < prev) return false;
            prev = v;
        }
        return true;
    };
    CHECK(nondecreasing(
        [](double t) { return seq_equilibrium_bid(t, 1, 3, 2, PriceRule::FirstPrice); },
        0.0, 1.0));
    CHECK(nondecreasing(
        [](double t) { return seq_equilibrium_bid(t, 1, 2, 1, PriceRule::SecondPrice); },
        0.0, 1.0));
    CHECK(nondecreasing(
        [](double t) { return split::first_round_bid(t, kSplit3); }, 1.0, 2.0 - 1e-6));
    CHECK(nondecreasing(
        [](double t) { return split::second_round_loser_bid(t, kSplit3); }, 1.0, 2.0));
}

TEST_CASE("first price shades and final-round second price is truthful") {
    for (int i = 1; i < 100; ++i) {
        const double theta = i / 100.0;
        CHECK(seq_equilibrium_bid(theta, 1, 3, 2, PriceRule::FirstPrice) < theta);
        CHECK(seq_equilibrium_bid(theta, 2, 3, 2, PriceRule::SecondPrice) ==
              Catch::Approx(theta));
    }
}

TEST_CASE("truthful sole offers never beat two truthful splits under DSE") {
    Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        const auto tp = sample_types(kSplit3, rng);
        double sole_best = tp.theta[0], split_best = kSplit3.scale_c * tp.theta[0];
        for (double t : tp.theta) {
            sole_best = std::min(sole_best, t);
            split_best = std::min(split_best, kSplit3.scale_c * t);
        }
        CHECK(split_best <= 0.5 * sole_best);
    }
}

TEST_CASE("simulated best response against a truthful opponent earns about 0.9") {
    EvalConfig cfg;
    cfg.n_profiles = 20000;
    cfg.seed = 17;
    LearnerFn oracle = [&](const Observation& o) {
        return oracle_learner_bid(ExperimentId::SplitTruthful2, o, kSplit2);
    };
    const auto [mean, se] =
        mc_expected_utility(kSplit2, StrategyKind::Truthful, oracle, cfg);
    CHECK(std::abs(mean - 0.9) <= 3.0 * se);
}
