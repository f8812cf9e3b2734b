#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "auctionrl/experiments.hpp"
#include "auctionrl/replay.hpp"

using namespace auctionrl;

namespace {

const AuctionSettings kSplit = make_experiment(ExperimentId::SplitTruthful2).settings;
const AuctionSettings kSeq = make_experiment(ExperimentId::Seq1FP2).settings;

TransitionRecord split_record(double own_type) {
    TransitionRecord rec;
    rec.obs.own_type = own_type;
    rec.obs.round = 0;
    rec.next_obs.own_type = own_type;
    rec.next_obs.round = 1;
    rec.next_obs.revealed_prices = {0.3};
    rec.action = {2.0, 0.3};
    rec.alloc = 1;
    rec.payment = 0.3;
    rec.cost_weight = 0.2;
    rec.reward = quasi_linear_reward(kSplit.kind, own_type, 1, 0.3, 0.2);
    rec.terminal = false;
    rec.behavior_type = own_type;
    return rec;
}

}  // namespace

TEST_CASE("relabeling rewrites the type slots and recomputes the reward") {
    const auto rec = split_record(1.5);
    const auto out = relabel(rec, 1.1, kSplit);
    CHECK(out.obs.own_type == 1.1);
    CHECK(out.next_obs.own_type == 1.1);
    CHECK(out.reward == 0.3 - 0.2 * 1.1);
    // mechanism-side fields are untouched
    CHECK(out.action == rec.action);
    CHECK(out.alloc == rec.alloc);
    CHECK(out.payment == rec.payment);
    CHECK(out.terminal == rec.terminal);
    CHECK(out.behavior_type == rec.behavior_type);
}

TEST_CASE("relabeling to the same type is bitwise identical") {
    const auto rec = split_record(1.3712345678901234);
    const auto out = relabel(rec, rec.obs.own_type, kSplit);
    CHECK(out.reward == rec.reward);
    CHECK(out.obs.own_type == rec.obs.own_type);
    CHECK(out.obs.features(kSplit) == rec.obs.features(kSplit));
}

TEST_CASE("relabeling keeps the terminal marker absorbing") {
    auto rec = split_record(1.5);
    rec.terminal = true;
    rec.next_obs = Observation::terminal_marker();
    const auto out = relabel(rec, 1.9, kSplit);
    CHECK(out.next_obs.absorbing);
    CHECK(out.next_obs.own_type == rec.next_obs.own_type);
}

TEST_CASE("relabeling carries the bid penalty unchanged") {
    auto rec = split_record(1.5);
    rec.bid_penalty = 0.25;
    rec.reward -= 0.25;
    const auto out = relabel(rec, 1.2, kSplit);
    CHECK(out.reward == quasi_linear_reward(kSplit.kind, 1.2, 1, 0.3, 0.2) - 0.25);
}

TEST_CASE("relabel types outside the prior support are rejected") {
    const auto rec = split_record(1.5);
    CHECK_THROWS_AS(relabel(rec, 0.9, kSplit), std::invalid_argument);
    CHECK_THROWS_AS(relabel(rec, 2.1, kSplit), std::invalid_argument);
}

TEST_CASE("the buffer is a bounded fifo") {
    ReplayBuffer buf(3);
    for (long e = 0; e < 5; ++e) {
        auto rec = split_record(1.5);
        rec.episode_id = e;
        buf.insert(std::move(rec));
    }
    CHECK(buf.size() == 3);
    CHECK(buf.inserted() == 5);
    std::vector<long> ids;
    for (std::size_t i = 0; i < buf.size(); ++i) ids.push_back(buf.at(i).episode_id);
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<long>{2, 3, 4});
    CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
}

TEST_CASE("sampling an empty buffer fails loudly") {
    ReplayBuffer buf(4);
    Rng rng(0);
    CHECK_THROWS_AS(buf.sample_one(rng), std::logic_error);
    CHECK_THROWS_AS(sample_minibatch(buf, 8, 0.0, kSplit, rng), std::logic_error);
}

TEST_CASE("fraction zero returns stored records verbatim") {
    ReplayBuffer buf(16);
    for (int i = 0; i < 8; ++i) buf.insert(split_record(1.0 + i * 0.1));
    Rng rng(3);
    const auto batch = sample_minibatch(buf, 64, 0.0, kSplit, rng);
    REQUIRE(batch.size() == 64);
    for (const auto& rec : batch) {
        bool found = false;
        for (std::size_t i = 0; i < buf.size(); ++i) {
            const auto& orig = buf.at(i);
            if (rec.obs.own_type == orig.obs.own_type && rec.reward == orig.reward)
                found = true;
        }
        CHECK(found);
        CHECK(rec.obs.own_type == rec.behavior_type);
    }
}

TEST_CASE("fraction one relabels every draw with uniform fresh types") {
    ReplayBuffer buf(4);
    for (int i = 0; i < 4; ++i) buf.insert(split_record(1.5));
    Rng rng(7);
    const int n = 4000;
    const auto batch = sample_minibatch(buf, n, 1.0, kSplit, rng);
    std::vector<double> types;
    for (const auto& rec : batch) {
        CHECK(rec.reward == 0.3 - 0.2 * rec.obs.own_type);
        types.push_back(rec.obs.own_type);
    }
    // one-sample KS statistic against U[1,2] at the 5% level
    std::sort(types.begin(), types.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = types[i] - 1.0;
        ks = std::max({ks, std::abs((i + 1.0) / n - cdf), std::abs(i / static_cast<double>(n) - cdf)});
    }
    CHECK(ks < 1.358 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampling never mutates the stored records") {
    ReplayBuffer buf(2);
    buf.insert(split_record(1.5));
    buf.insert(split_record(1.7));
    Rng rng(9);
    (void)sample_minibatch(buf, 256, 1.0, kSplit, rng);
    CHECK(buf.at(0).obs.own_type == 1.5);
    CHECK(buf.at(1).obs.own_type == 1.7);
    CHECK(buf.at(0).reward == 0.3 - 0.2 * 1.5);
}

TEST_CASE("out-of-range fractions are rejected") {
    ReplayBuffer buf(2);
    buf.insert(split_record(1.5));
    Rng rng(0);
    CHECK_THROWS_AS(sample_minibatch(buf, 4, -0.1, kSplit, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_minibatch(buf, 4, 1.1, kSplit, rng), std::invalid_argument);
}

TEST_CASE("sequential records relabel with the sales reward convention") {
    TransitionRecord rec;
    rec.obs.own_type = 0.8;
    rec.obs.round = 0;
    rec.next_obs = Observation::terminal_marker();
    rec.terminal = true;
    rec.action = {0.4};
    rec.alloc = 1;
    rec.payment = 0.4;
    rec.cost_weight = 0.0;
    rec.reward = quasi_linear_reward(kSeq.kind, 0.8, 1, 0.4, 0.0);
    REQUIRE(rec.reward == Catch::Approx(0.4));
    const auto out = relabel(rec, 0.25, kSeq);
    CHECK(out.reward == Catch::Approx(-0.15));
}
