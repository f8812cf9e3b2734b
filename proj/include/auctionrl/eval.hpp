#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "auctionrl/auction.hpp"
#include "auctionrl/experiment_id.hpp"
#include "auctionrl/policy.hpp"
#include "auctionrl/rollout.hpp"
#include "auctionrl/strategies.hpp"

namespace auctionrl {

struct EvalConfig {
    int n_profiles = 4000;
    int grid_size = 100;
    unsigned long seed = 0;
    bool deterministic_policy = true;  // evaluate at the squashed mean

    void validate() const {
        if (n_profiles <= 0 || grid_size <= 1)
            throw std::invalid_argument("eval config sizes must be positive");
    }
};

struct EvalReport {
    ExperimentId id = ExperimentId::Seq1SP2;
    double optimal_reward = 0.0;
    double achieved_reward = 0.0;
    double achieved_se = 0.0;
    double utility_difference = 0.0;
    std::vector<std::pair<std::string, double>> l2_per_round;
    double l2_value_function = 0.0;
    int n_profiles = 0;

    void write_keyvalue(std::ostream& os) const {
        os << "experiment=" << to_string(id) << '\n'
           << "optimal_reward=" << optimal_reward << '\n'
           << "achieved_reward=" << achieved_reward << '\n'
           << "achieved_se=" << achieved_se << '\n'
           << "utility_difference=" << utility_difference << '\n';
        for (const auto& [k, v] : l2_per_round) os << "l2_" << k << '=' << v << '\n';
        os << "l2_value_function=" << l2_value_function << '\n'
           << "n_profiles=" << n_profiles << '\n';
    }

    void write_row(std::ostream& os) const {
        os << to_string(id) << '\t' << optimal_reward << '\t' << achieved_reward
           << '\t' << achieved_se << '\t' << utility_difference;
        for (const auto& [k, v] : l2_per_round) os << '\t' << v;
        os << '\t' << l2_value_function << '\t' << n_profiles << '\n';
    }
};

// Monte Carlo estimate of the learner's expected episode utility over fresh
// type profiles. Returns {mean, standard error}.
inline std::pair<double, double> mc_expected_utility(const AuctionSettings& settings,
                                                     StrategyKind opponents,
                                                     const LearnerFn& learner,
                                                     const EvalConfig& cfg,
                                                     double neg_bid_penalty = 0.0) {
    cfg.validate();
    Rng rng(cfg.seed);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < cfg.n_profiles; ++i) {
        const double r =
            run_episode(settings, opponents, learner, rng, i, neg_bid_penalty)
                .learner_return;
        sum += r;
        sum_sq += r * r;
    }
    const double n = static_cast<double>(cfg.n_profiles);
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

namespace detail {

inline std::vector<double> type_grid(const AuctionSettings& s, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = s.type_lo + (s.type_hi - s.type_lo) * i / static_cast<double>(n - 1);
    return g;
}

// Action dimensions compared for a given decision round, with row labels.
inline std::vector<std::pair<std::string, int>> compared_dims(
    const AuctionSettings& s, int round) {
    if (s.kind == AuctionKind::SplitAward) {
        if (round == 0)
            return {{"round1_sole", 0}, {"round1_split", 1}};
        return {{"round2", 1}};
    }
    return {{"round" + std::to_string(round + 1), 0}};
}

// Reachable observations for a decision round: round 1 is a deterministic
// type grid; later rounds come from seeded oracle-vs-oracle play.
inline std::vector<Observation> eval_observations(ExperimentId id,
                                                  const AuctionSettings& s,
                                                  int round, const EvalConfig& cfg) {
    std::vector<Observation> out;
    if (round == 0) {
        for (double theta : type_grid(s, cfg.grid_size)) {
            Observation o;
            o.own_type = theta;
            o.round = 0;
            out.push_back(o);
        }
        return out;
    }
    Rng rng(cfg.seed + 1);
    LearnerFn oracle = [&](const Observation& o) {
        return oracle_learner_bid(id, o, s);
    };
    const StrategyKind opp = opponent_kind(id);
    for (int i = 0; i < cfg.grid_size && static_cast<int>(out.size()) < cfg.grid_size;
         ++i) {
        for (const auto& t : run_episode(s, opp, oracle, rng, i).transitions)
            if (t.obs.round == round) out.push_back(t.obs);
    }
    return out;
}

}  // namespace detail

// Root-mean-square gap between a deterministic policy and the oracle bid over
// the round's evaluation set, one value per compared action dimension.
inline std::vector<std::pair<std::string, double>> l2_policy_distance(
    const LearnerFn& learner, ExperimentId id, const AuctionSettings& settings,
    int round, const EvalConfig& cfg) {
    cfg.validate();
    if (round < 0 || round >= settings.n_rounds)
        throw std::invalid_argument("round without an oracle");
    const auto obs_set = detail::eval_observations(id, settings, round, cfg);
    const auto dims = detail::compared_dims(settings, round);
    std::vector<double> sq(dims.size(), 0.0);
    for (const auto& obs : obs_set) {
        const auto a = learner(obs);
        const auto oracle = oracle_learner_bid(id, obs, settings);
        for (std::size_t d = 0; d < dims.size(); ++d) {
            const double diff = a.at(dims[d].second) - oracle.at(dims[d].second);
            sq[d] += diff * diff;
        }
    }
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t d = 0; d < dims.size(); ++d)
        out.emplace_back(dims[d].first,
                         obs_set.empty() ? 0.0
                                         : std::sqrt(sq[d] / obs_set.size()));
    return out;
}

// RMS distance between the min of the two critics (at the policy's mean
// action) and the analytic value function, over the round-1 type grid. Raw
// soft-Q output is compared; the entropy bonus is not subtracted.
inline double l2_value_distance(const Mlp& q1, const Mlp& q2,
                                const GaussianPolicy& policy, ExperimentId id,
                                const AuctionSettings& settings,
                                const EvalConfig& cfg) {
    cfg.validate();
    double sq = 0.0;
    const auto grid = detail::type_grid(settings, cfg.grid_size);
    for (double theta : grid) {
        Observation o;
        o.own_type = theta;
        o.round = 0;
        const Vector feats = o.features(settings);
        Vector in = feats;
        const Vector a = policy.mean_action(feats);
        in.insert(in.end(), a.begin(), a.end());
        const double q = std::min(mlp_forward(q1, in)[0], mlp_forward(q2, in)[0]);
        const double v = oracle_value_function(id, o, settings);
        sq += (q - v) * (q - v);
    }
    return std::sqrt(sq / grid.size());
}

inline double utility_difference(const AuctionSettings& settings, ExperimentId id,
                                 StrategyKind opponents, const LearnerFn& learner,
                                 const EvalConfig& cfg, double neg_bid_penalty = 0.0) {
    return oracle_expected_utility(id, settings) -
           mc_expected_utility(settings, opponents, learner, cfg, neg_bid_penalty)
               .first;
}

// Full per-experiment report for a learned policy and critic pair.
inline EvalReport evaluate_policy(const GaussianPolicy& policy, const Mlp& q1,
                                  const Mlp& q2, ExperimentId id,
                                  const AuctionSettings& settings,
                                  const EvalConfig& cfg,
                                  double neg_bid_penalty = 0.0) {
    cfg.validate();
    EvalReport rep;
    rep.id = id;
    rep.n_profiles = cfg.n_profiles;
    rep.optimal_reward = oracle_expected_utility(id, settings);

    Rng sample_rng(cfg.seed + 2);
    LearnerFn learner = [&](const Observation& obs) {
        const Vector feats = obs.features(settings);
        return cfg.deterministic_policy
                   ? policy.mean_action(feats)
                   : policy.sample(feats, sample_rng).action;
    };
    const auto [mean, se] =
        mc_expected_utility(settings, opponent_kind(id), learner, cfg, neg_bid_penalty);
    rep.achieved_reward = mean;
    rep.achieved_se = se;
    rep.utility_difference = rep.optimal_reward - mean;

    LearnerFn mean_learner = [&](const Observation& obs) {
        return policy.mean_action(obs.features(settings));
    };
    for (int round = 0; round < settings.n_rounds; ++round)
        for (auto& kv : l2_policy_distance(mean_learner, id, settings, round, cfg))
            rep.l2_per_round.push_back(std::move(kv));
    rep.l2_value_function = l2_value_distance(q1, q2, policy, id, settings, cfg);
    return rep;
}

// Plot-data exports: (theta, learned bid, oracle bid) per dimension of one
// round, and the (theta, observed price, bid) second-round surface.
inline void export_bid_table(std::ostream& os, const LearnerFn& learner,
                             ExperimentId id, const AuctionSettings& settings,
                             int round, const EvalConfig& cfg) {
    const auto obs_set = detail::eval_observations(id, settings, round, cfg);
    const auto dims = detail::compared_dims(settings, round);
    os << "theta";
    for (const auto& [name, _] : dims) os << "\tlearned_" << name << "\toracle_" << name;
    os << '\n';
    for (const auto& obs : obs_set) {
        const auto a = learner(obs);
        const auto oracle = oracle_learner_bid(id, obs, settings);
        os << obs.own_type;
        for (const auto& [_, d] : dims) os << '\t' << a.at(d) << '\t' << oracle.at(d);
        os << '\n';
    }
}

inline void export_round2_surface(std::ostream& os, const LearnerFn& learner,
                                  ExperimentId id, const AuctionSettings& settings,
                                  const EvalConfig& cfg) {
    if (settings.n_rounds < 2)
        throw std::invalid_argument("surface export needs a second round");
    const int dim = settings.kind == AuctionKind::SplitAward ? 1 : 0;
    os << "theta\tobserved_price\tlearned_bid\toracle_bid\n";
    const auto thetas = detail::type_grid(settings, cfg.grid_size);
    // Price axis spans what round 1 can reveal.
    const double p_hi = settings.kind == AuctionKind::SplitAward
                            ? settings.scale_c * settings.type_hi
                            : settings.type_hi;
    const double p_lo = settings.kind == AuctionKind::SplitAward
                            ? settings.scale_c * settings.type_lo
                            : 0.0;
    for (double theta : thetas) {
        for (int j = 0; j < cfg.grid_size; ++j) {
            const double p =
                p_lo + (p_hi - p_lo) * j / static_cast<double>(cfg.grid_size - 1);
            Observation o;
            o.own_type = theta;
            o.round = 1;
            o.revealed_prices = {p};
            const auto a = learner(o);
            const auto oracle = oracle_learner_bid(id, o, settings);
            os << theta << '\t' << p << '\t' << a.at(dim) << '\t' << oracle.at(dim)
               << '\n';
        }
    }
}

}  // namespace auctionrl
