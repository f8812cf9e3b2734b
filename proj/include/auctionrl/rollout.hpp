#pragma once

#include <functional>
#include <vector>

#include "auctionrl/auction.hpp"
#include "auctionrl/strategies.hpp"

namespace auctionrl {

// One replay entry for the learner's seat, plus enough of the round outcome
// to recompute the reward under a different own type.
struct TransitionRecord {
    Observation obs;
    Observation next_obs;  // absorbing marker when terminal
    std::vector<double> action;  // raw policy output (critic input)
    double reward = 0.0;
    bool terminal = false;
    long episode_id = 0;
    double behavior_type = 0.0;
    // outcome snapshot
    int alloc = 0;
    double payment = 0.0;
    double cost_weight = 0.0;
    double bid_penalty = 0.0;  // negative-bid penalty, type-independent
};

// Maps an observation to a raw action vector of settings.action_dim() entries.
using LearnerFn = std::function<std::vector<double>(const Observation&)>;

struct EpisodeResult {
    double learner_return = 0.0;
    std::vector<TransitionRecord> transitions;
};

// Plays one full episode with the learner in seat 0 against fixed opponents.
// Raw learner actions are clamped at zero before entering the mechanism; the
// clamped amount is charged back at `neg_bid_penalty` per unit.
inline EpisodeResult run_episode(const AuctionSettings& settings,
                                 StrategyKind opponents, const LearnerFn& learner,
                                 Rng& rng, long episode_id = 0,
                                 double neg_bid_penalty = 0.0) {
    AuctionState state = AuctionState::initial(settings, sample_types(settings, rng));
    EpisodeResult res;
    const double own_type = state.types.theta[0];

    auto clamp_bid = [&](double raw, double& penalty) {
        if (raw < 0.0) {
            penalty += neg_bid_penalty * (-raw);
            return 0.0;
        }
        return raw;
    };

    while (!state.terminal && state.active[0]) {
        const Observation obs = observe(state, 0);
        const std::vector<double> action = learner(obs);
        double penalty = 0.0;
        RoundOutcome out;

        if (settings.kind == AuctionKind::SequentialSales) {
            std::vector<double> bids;
            for (int i = 0; i < settings.n_bidders; ++i) {
                if (!state.active[i]) continue;
                bids.push_back(i == 0 ? clamp_bid(action.at(0), penalty)
                                      : seq_opponent_bid(opponents, observe(state, i),
                                                         settings));
            }
            out = seq_sales_step(state, bids, rng);
        } else if (state.round == 0) {
            std::vector<SplitBid> bids(settings.n_bidders);
            bids[0].sole = clamp_bid(action.at(0), penalty);
            bids[0].split = clamp_bid(action.at(1), penalty);
            for (int i = 1; i < settings.n_bidders; ++i)
                bids[i] = split_opponent_bid(opponents, observe(state, i), settings);
            out = split_award_step(state, bids, rng);
        } else {
            std::vector<double> bids(settings.n_bidders);
            bids[0] = clamp_bid(action.at(1), penalty);
            for (int i = 1; i < settings.n_bidders; ++i)
                bids[i] = split_opponent_bid(opponents, observe(state, i), settings).split;
            out = split_award_step(state, bids, rng);
        }

        TransitionRecord rec;
        rec.obs = obs;
        rec.action = action;
        rec.alloc = out.allocations[0];
        rec.payment = out.payments[0];
        rec.cost_weight = out.cost_weights[0];
        rec.bid_penalty = penalty;
        rec.reward = reward(settings, own_type, out, 0) - penalty;
        rec.terminal = state.terminal || !state.active[0];
        rec.next_obs =
            rec.terminal ? Observation::terminal_marker() : observe(state, 0);
        rec.episode_id = episode_id;
        rec.behavior_type = own_type;
        res.learner_return += rec.reward;
        res.transitions.push_back(std::move(rec));
    }
    return res;
}

// Alg.-style experience collection: n_episodes fresh episodes, each with a
// freshly sampled type profile.
inline std::vector<TransitionRecord> collect_experience(
    const AuctionSettings& settings, StrategyKind opponents,
    const LearnerFn& learner, int n_episodes, Rng& rng, long first_episode_id = 0,
    double neg_bid_penalty = 0.0, double* mean_return = nullptr) {
    std::vector<TransitionRecord> all;
    double total = 0.0;
    for (int e = 0; e < n_episodes; ++e) {
        EpisodeResult ep = run_episode(settings, opponents, learner, rng,
                                       first_episode_id + e, neg_bid_penalty);
        total += ep.learner_return;
        for (auto& t : ep.transitions) all.push_back(std::move(t));
    }
    if (mean_return) *mean_return = n_episodes > 0 ? total / n_episodes : 0.0;
    return all;
}

}  // namespace auctionrl
