#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "auctionrl/auction.hpp"
#include "auctionrl/experiment_id.hpp"
#include "auctionrl/quadrature.hpp"

namespace auctionrl {

enum class StrategyKind { Truthful, Equilibrium, BestResponseToTruthful, Learned };

enum class SplitRole { FirstRound, SecondRoundWinner, SecondRoundLoser };

// ---------------------------------------------------------------------------
// Sequential sales (uniform types on [0,1], N bidders, K items)
// ---------------------------------------------------------------------------

// Symmetric equilibrium bid in round k (1-based).
inline double seq_equilibrium_bid(double theta, int round_k, int n, int k_items,
                                  PriceRule rule) {
    if (round_k < 1 || round_k > k_items || k_items >= n)
        throw std::invalid_argument("round out of range");
    if (rule == PriceRule::FirstPrice)
        return theta * static_cast<double>(n - k_items) / static_cast<double>(n - round_k + 1);
    return theta * static_cast<double>(n - k_items) / static_cast<double>(n - round_k);
}

// Best response against truthful opponents: lose every round but the last,
// then snipe below the cheapest price seen so far.
inline double seq_best_response_truthful(const Observation& obs, PriceRule rule,
                                         int n_rounds) {
    if (obs.round < n_rounds - 1) return 0.0;
    double p_min = std::numeric_limits<double>::infinity();
    for (double p : obs.revealed_prices) p_min = std::min(p_min, p);
    const double target =
        rule == PriceRule::SecondPrice ? obs.own_type : 0.5 * obs.own_type;
    return std::min(target, p_min);
}

// ---------------------------------------------------------------------------
// Split-award (reverse auction, uniform types on [type_lo, type_hi])
// ---------------------------------------------------------------------------

namespace split {

inline double F(const AuctionSettings& s, double t) {
    return (t - s.type_lo) / (s.type_hi - s.type_lo);
}
inline double f(const AuctionSettings& s) { return 1.0 / (s.type_hi - s.type_lo); }

// Second-round split bid of a first-round loser,
//   C*theta + C * int_theta^hi (1-F)^{n-2} dt / (1-F(theta))^{n-2},
// by quadrature, with the continuous extension at the upper type bound.
inline double second_round_loser_bid(double theta, const AuctionSettings& s) {
    const int n = s.n_bidders;
    const double C = s.scale_c;
    const double surv = 1.0 - F(s, theta);
    if (surv <= 1e-12)
        return C * theta + C * (s.type_hi - theta) / static_cast<double>(n - 1);
    const double integral = integrate(
        [&](double t) { return std::pow(1.0 - F(s, t), n - 2); }, theta, s.type_hi);
    return C * theta + C * integral / std::pow(surv, n - 2);
}

// First-round split bid: conditional expectation of the losers' second-round
// bid over opponents with higher cost, evaluated by nested quadrature.
inline double first_round_bid(double theta, const AuctionSettings& s) {
    const int n = s.n_bidders;
    if (n < 3) throw std::invalid_argument("split equilibrium needs n >= 3");
    const double surv = 1.0 - F(s, theta);
    if (surv <= 1e-9) return s.scale_c * s.type_hi;  // 0/0 limit
    const double integral = integrate(
        [&](double t) {
            return second_round_loser_bid(t, s) * static_cast<double>(n - 1) *
                   std::pow(1.0 - F(s, t), n - 2) * f(s);
        },
        theta, s.type_hi);
    return integral / std::pow(surv, n - 1);
}

inline double second_round_winner_bid(double theta, const AuctionSettings& s) {
    return theta * (1.0 - s.scale_c);
}

}  // namespace split

// Closed forms for n=3 bidders, uniform types on [1,2].
inline std::pair<double, double> split_equilibrium_closed_form_n3(double theta,
                                                                 double C) {
    if (theta < 1.0 || theta > 2.0)
        throw std::invalid_argument("theta outside [1,2]");
    const double first = C / 3.0 * (theta + 4.0);
    const double loser = C * (theta + 0.5 * (2.0 - theta));
    return {first, loser};
}

// Equilibrium bid for one decision point. The first-round sole bid carries no
// information in equilibrium; any surely-losing offer works, we pin 2*type_hi.
inline SplitBid split_equilibrium_bid(double theta, SplitRole role,
                                      const AuctionSettings& s) {
    SplitBid b;
    switch (role) {
        case SplitRole::FirstRound:
            b.sole = 2.0 * s.type_hi;
            b.split = split::first_round_bid(theta, s);
            break;
        case SplitRole::SecondRoundWinner:
            b.split = split::second_round_winner_bid(theta, s);
            break;
        case SplitRole::SecondRoundLoser:
            b.split = split::second_round_loser_bid(theta, s);
            break;
    }
    return b;
}

// Best response to a single truthful opponent under DSE: throw the first
// round, read the opponent's type off the revealed price, then match their
// second-round offer (the split-favouring tiebreak awards us the unit).
inline SplitBid split_best_response_truthful(const Observation& obs,
                                             const AuctionSettings& s) {
    SplitBid b;
    if (obs.round == 0) {
        b.sole = 2.0 * s.type_hi;
        b.split = 2.0 * s.scale_c * s.type_hi;
        return b;
    }
    if (obs.revealed_prices.empty())
        throw std::logic_error("round 2 without a revealed price");
    const double theta_o = obs.revealed_prices[0] / s.scale_c;
    b.split = (1.0 - s.scale_c) * theta_o;
    return b;
}

inline SplitBid truthful_split_bid(double theta, int round, bool won_round1,
                                   const AuctionSettings& s) {
    SplitBid b;
    if (round == 0) {
        b.sole = theta;
        b.split = s.scale_c * theta;
    } else {
        b.split = won_round1 ? (1.0 - s.scale_c) * theta : s.scale_c * theta;
    }
    return b;
}

// ---------------------------------------------------------------------------
// Fixed opponent dispatch
// ---------------------------------------------------------------------------

inline double seq_opponent_bid(StrategyKind kind, const Observation& obs,
                               const AuctionSettings& s) {
    if (kind == StrategyKind::Truthful) return obs.own_type;
    if (kind == StrategyKind::Equilibrium)
        return seq_equilibrium_bid(obs.own_type, obs.round + 1, s.n_bidders,
                                   s.n_rounds, s.price_rule);
    throw std::invalid_argument("unsupported opponent strategy");
}

inline SplitBid split_opponent_bid(StrategyKind kind, const Observation& obs,
                                   const AuctionSettings& s) {
    const bool won = obs.own_round1_award == Round1Award::Split;
    if (kind == StrategyKind::Truthful)
        return truthful_split_bid(obs.own_type, obs.round, won, s);
    if (kind == StrategyKind::Equilibrium) {
        if (obs.round == 0)
            return split_equilibrium_bid(obs.own_type, SplitRole::FirstRound, s);
        return split_equilibrium_bid(obs.own_type,
                                     won ? SplitRole::SecondRoundWinner
                                         : SplitRole::SecondRoundLoser,
                                     s);
    }
    throw std::invalid_argument("unsupported opponent strategy");
}

// ---------------------------------------------------------------------------
// Per-experiment oracles
// ---------------------------------------------------------------------------

// The optimal (best-response) strategy for the learner's seat, as a raw
// action vector matching AuctionSettings::action_dim().
inline std::vector<double> oracle_learner_bid(ExperimentId id, const Observation& obs,
                                              const AuctionSettings& s) {
    switch (id) {
        case ExperimentId::Seq1FP2:
        case ExperimentId::Seq1SP2:
        case ExperimentId::Seq2FPTruthful3:
            return {seq_best_response_truthful(obs, s.price_rule, s.n_rounds)};
        case ExperimentId::Seq2FPEquilibrium3:
            return {seq_equilibrium_bid(obs.own_type, obs.round + 1, s.n_bidders,
                                        s.n_rounds, s.price_rule)};
        case ExperimentId::SplitTruthful2: {
            const SplitBid b = split_best_response_truthful(obs, s);
            return {b.sole, b.split};
        }
        case ExperimentId::SplitEquilibrium3: {
            const SplitBid b = split_opponent_bid(StrategyKind::Equilibrium, obs, s);
            return obs.round == 0 ? std::vector<double>{b.sole, b.split}
                                  : std::vector<double>{2.0 * s.type_hi, b.split};
        }
    }
    throw std::logic_error("unknown experiment id");
}

inline StrategyKind opponent_kind(ExperimentId id) {
    switch (id) {
        case ExperimentId::SplitTruthful2:
        case ExperimentId::Seq2FPTruthful3:
            return StrategyKind::Truthful;
        default:
            return StrategyKind::Equilibrium;
    }
}

// Expected remaining utility of the optimal policy at an observation.
inline double oracle_value_function(ExperimentId id, const Observation& obs,
                                    const AuctionSettings& s) {
    if (obs.absorbing) return 0.0;
    const double theta = obs.own_type;
    const double C = s.scale_c;
    switch (id) {
        case ExperimentId::Seq1FP2:
        case ExperimentId::Seq1SP2:
            // Bid theta/2 resp. theta against an equilibrium opponent; both
            // yield win probability theta at expected margin theta/2.
            return 0.5 * theta * theta;
        case ExperimentId::Seq2FPTruthful3: {
            if (obs.round == 0) {
                // Lose round 1; condition on the losing opponents' max M and
                // min m, bid min(theta/2, M) in round 2.
                return integrate(
                    [&](double M) {
                        const double b = std::min(0.5 * theta, M);
                        return 2.0 * (theta - b) * std::min(b, M);
                    },
                    0.0, 1.0);
            }
            if (obs.revealed_prices.empty()) return 0.0;
            const double p1 = obs.revealed_prices[0];
            if (p1 <= 0.0) return 0.0;
            const double b = std::min(0.5 * theta, p1);
            return (theta - b) * std::min(b, p1) / p1;
        }
        case ExperimentId::Seq2FPEquilibrium3: {
            if (obs.round == 0) {
                return theta * theta * (theta - theta / 3.0) +
                       2.0 * theta * (1.0 - theta) * 0.5 * theta;
            }
            if (obs.revealed_prices.empty()) return 0.0;
            const double max_o = std::min(3.0 * obs.revealed_prices[0], 1.0);
            if (max_o <= 0.0) return 0.0;
            return std::min(theta, max_o) / max_o * 0.5 * theta;
        }
        case ExperimentId::SplitTruthful2: {
            if (obs.round == 0) {
                return integrate(
                    [&](double u) {
                        return ((1.0 - C) * u - C * theta) * split::f(s);
                    },
                    s.type_lo, s.type_hi);
            }
            if (obs.own_round1_award == Round1Award::Split)
                throw std::invalid_argument("no oracle value off the losing path");
            const double theta_o = obs.revealed_prices.at(0) / C;
            return (1.0 - C) * theta_o - C * theta;
        }
        case ExperimentId::SplitEquilibrium3: {
            const double Ft = split::F(s, theta);
            if (obs.round == 0) {
                const double win1 = split::first_round_bid(theta, s) - C * theta;
                const double win2 = split::second_round_loser_bid(theta, s) - C * theta;
                return (1.0 - Ft) * (1.0 - Ft) * win1 +
                       2.0 * Ft * (1.0 - Ft) * win2;
            }
            if (obs.own_round1_award == Round1Award::Split)
                return (1.0 - C) * theta - (1.0 - C) * theta;  // priced at cost
            // Winner's type from inverting the n=3 first-round bid.
            const double theta_w =
                std::clamp(3.0 * obs.revealed_prices.at(0) / C - 4.0, s.type_lo,
                           s.type_hi);
            if (theta <= theta_w || s.type_hi <= theta_w)
                return split::second_round_loser_bid(theta, s) - C * theta;
            const double p_win = (s.type_hi - theta) / (s.type_hi - theta_w);
            return p_win * (split::second_round_loser_bid(theta, s) - C * theta);
        }
    }
    throw std::logic_error("unknown experiment id");
}

// Optimal expected utility before types are drawn: the round-1 value
// averaged over the learner's own type.
inline double oracle_expected_utility(ExperimentId id, const AuctionSettings& s) {
    Observation obs;
    obs.round = 0;
    return integrate(
        [&](double theta) {
            Observation o = obs;
            o.own_type = theta;
            return oracle_value_function(id, o, s) / (s.type_hi - s.type_lo);
        },
        s.type_lo, s.type_hi);
}

}  // namespace auctionrl
