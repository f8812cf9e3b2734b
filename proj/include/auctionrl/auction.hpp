#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace auctionrl {

enum class AuctionKind { SequentialSales, SplitAward };
enum class PriceRule { FirstPrice, SecondPrice };

using Rng = std::mt19937_64;

// Static description of one auction game.
struct AuctionSettings {
    int n_bidders = 2;
    int n_rounds = 1;
    PriceRule price_rule = PriceRule::FirstPrice;  // sequential sales only
    double type_lo = 0.0;
    double type_hi = 1.0;
    double scale_c = 0.2;  // split-award only
    AuctionKind kind = AuctionKind::SequentialSales;

    void validate() const {
        if (n_bidders < 2) throw std::invalid_argument("need at least 2 bidders");
        if (n_rounds < 1) throw std::invalid_argument("need at least 1 round");
        if (!(type_lo < type_hi)) throw std::invalid_argument("type_lo >= type_hi");
        if (kind == AuctionKind::SequentialSales) {
            if (n_rounds >= n_bidders)
                throw std::invalid_argument("sequential sales needs n_rounds < n_bidders");
        } else {
            if (n_rounds > 2) throw std::invalid_argument("split-award has at most 2 rounds");
            if (!(scale_c > 0.0 && scale_c < 1.0))
                throw std::invalid_argument("scale_c must lie in (0,1)");
        }
    }

    bool dse() const { return scale_c <= type_lo / (2.0 * type_hi); }

    // Feature layout: [own_type | round one-hot (H) | revealed prices padded
    // to H | own_won | round-1 split flag]. Zero everywhere is the absorbing
    // terminal marker.
    int obs_dim() const { return 2 * n_rounds + 3; }

    // Split-award round 1 takes (sole, split); every other decision point is
    // a single bid. The action vector is fixed-size per experiment.
    int action_dim() const { return kind == AuctionKind::SplitAward ? 2 : 1; }
};

struct TypeProfile {
    std::vector<double> theta;
};

inline TypeProfile sample_types(const AuctionSettings& s, Rng& rng) {
    std::uniform_real_distribution<double> dist(s.type_lo, s.type_hi);
    TypeProfile tp;
    tp.theta.resize(s.n_bidders);
    for (auto& t : tp.theta) t = dist(rng);
    return tp;
}

struct RoundOutcome {
    std::vector<int> allocations;      // units awarded this round, per bidder
    std::vector<double> payments;      // seq: buyer pays; split: seller receives
    std::vector<double> cost_weights;  // split: fraction of theta this round costs
    double revealed_price = 0.0;
    bool sole_awarded = false;
};

struct AuctionState {
    AuctionSettings settings;
    TypeProfile types;
    int round = 0;
    std::vector<char> active;  // sequential sales: who has not yet won
    std::vector<RoundOutcome> history;
    bool terminal = false;
    int split_round1_winner = -1;

    static AuctionState initial(const AuctionSettings& s, TypeProfile types) {
        s.validate();
        if (static_cast<int>(types.theta.size()) != s.n_bidders)
            throw std::invalid_argument("type profile size mismatch");
        AuctionState st;
        st.settings = s;
        st.types = std::move(types);
        st.active.assign(s.n_bidders, 1);
        return st;
    }
};

// Shared reward arithmetic: the environment and the replay relabeler must go
// through the same path so recomputed rewards match bit for bit.
inline double quasi_linear_reward(AuctionKind kind, double own_type, int alloc,
                                  double payment, double cost_weight) {
    if (kind == AuctionKind::SequentialSales)
        return own_type * static_cast<double>(alloc) - payment;
    return payment - cost_weight * own_type;
}

inline double reward(const AuctionSettings& s, double own_type,
                     const RoundOutcome& outcome, int bidder) {
    return quasi_linear_reward(s.kind, own_type, outcome.allocations.at(bidder),
                               outcome.payments.at(bidder),
                               outcome.cost_weights.at(bidder));
}

namespace detail {

inline int pick_uniform(const std::vector<int>& candidates, Rng& rng) {
    if (candidates.size() == 1) return candidates.front();
    std::uniform_int_distribution<std::size_t> d(0, candidates.size() - 1);
    return candidates[d(rng)];
}

}  // namespace detail

// One round of sequential sales. `bids` holds one entry per *active* bidder,
// in bidder-index order. Highest bid wins; the winner leaves the auction.
inline RoundOutcome seq_sales_step(AuctionState& state,
                                   const std::vector<double>& bids, Rng& rng) {
    if (state.terminal) throw std::logic_error("step on terminal state");
    if (state.settings.kind != AuctionKind::SequentialSales)
        throw std::logic_error("seq_sales_step on wrong auction kind");
    std::vector<int> active_ids;
    for (int i = 0; i < state.settings.n_bidders; ++i)
        if (state.active[i]) active_ids.push_back(i);
    if (bids.size() != active_ids.size())
        throw std::invalid_argument("one bid per active bidder required");
    for (double b : bids)
        if (!(b >= 0.0)) throw std::invalid_argument("negative bid");

    double best = -1.0;
    std::vector<int> tied;
    for (std::size_t j = 0; j < bids.size(); ++j) {
        if (bids[j] > best) {
            best = bids[j];
            tied = {static_cast<int>(j)};
        } else if (bids[j] == best) {
            tied.push_back(static_cast<int>(j));
        }
    }
    const int win_slot = detail::pick_uniform(tied, rng);
    const int winner = active_ids[win_slot];

    double second = 0.0;
    if (tied.size() > 1) {
        second = best;
    } else {
        for (std::size_t j = 0; j < bids.size(); ++j)
            if (static_cast<int>(j) != win_slot && bids[j] > second) second = bids[j];
    }

    RoundOutcome out;
    out.allocations.assign(state.settings.n_bidders, 0);
    out.payments.assign(state.settings.n_bidders, 0.0);
    out.cost_weights.assign(state.settings.n_bidders, 0.0);
    out.allocations[winner] = 1;
    const double price =
        state.settings.price_rule == PriceRule::FirstPrice ? best : second;
    out.payments[winner] = price;
    out.revealed_price = price;

    state.active[winner] = 0;
    state.history.push_back(out);
    state.round += 1;
    if (state.round == state.settings.n_rounds) state.terminal = true;
    return out;
}

struct SplitBid {
    double sole = 0.0;
    double split = 0.0;
};

// Split-award round 1: compare the best sole offer against two splits at unit
// price. A tie at the unit-price comparison goes to the split.
inline RoundOutcome split_award_step(AuctionState& state,
                                     const std::vector<SplitBid>& bids, Rng& rng) {
    if (state.terminal) throw std::logic_error("step on terminal state");
    if (state.settings.kind != AuctionKind::SplitAward)
        throw std::logic_error("split_award_step on wrong auction kind");
    if (state.round != 0) throw std::logic_error("round-1 bids in round 2");
    if (static_cast<int>(bids.size()) != state.settings.n_bidders)
        throw std::invalid_argument("one (sole, split) bid per bidder required");
    for (const auto& b : bids)
        if (!(b.sole >= 0.0 && b.split >= 0.0))
            throw std::invalid_argument("negative bid");

    double sole_best = bids[0].sole, split_best = bids[0].split;
    for (const auto& b : bids) {
        sole_best = std::min(sole_best, b.sole);
        split_best = std::min(split_best, b.split);
    }

    RoundOutcome out;
    out.allocations.assign(state.settings.n_bidders, 0);
    out.payments.assign(state.settings.n_bidders, 0.0);
    out.cost_weights.assign(state.settings.n_bidders, 0.0);

    if (split_best > 0.5 * sole_best) {
        std::vector<int> tied;
        for (int i = 0; i < state.settings.n_bidders; ++i)
            if (bids[i].sole == sole_best) tied.push_back(i);
        const int winner = detail::pick_uniform(tied, rng);
        out.allocations[winner] = 2;
        out.payments[winner] = sole_best;
        out.cost_weights[winner] = 1.0;
        out.revealed_price = sole_best;
        out.sole_awarded = true;
        state.terminal = true;
    } else {
        std::vector<int> tied;
        for (int i = 0; i < state.settings.n_bidders; ++i)
            if (bids[i].split == split_best) tied.push_back(i);
        const int winner = detail::pick_uniform(tied, rng);
        out.allocations[winner] = 1;
        out.payments[winner] = split_best;
        out.cost_weights[winner] = state.settings.scale_c;
        out.revealed_price = split_best;
        state.split_round1_winner = winner;
    }
    state.history.push_back(out);
    state.round += 1;
    return out;
}

// Split-award round 2: lowest offer sells the remaining unit. A tie between
// the round-1 winner and anyone else resolves toward splitting the award
// across two bidders, i.e. against the round-1 winner.
inline RoundOutcome split_award_step(AuctionState& state,
                                     const std::vector<double>& bids, Rng& rng) {
    if (state.terminal) throw std::logic_error("step on terminal state");
    if (state.settings.kind != AuctionKind::SplitAward)
        throw std::logic_error("split_award_step on wrong auction kind");
    if (state.round != 1) throw std::logic_error("round-2 bids in round 1");
    if (static_cast<int>(bids.size()) != state.settings.n_bidders)
        throw std::invalid_argument("one bid per bidder required");
    for (double b : bids)
        if (!(b >= 0.0)) throw std::invalid_argument("negative bid");

    double best = bids[0];
    for (double b : bids) best = std::min(best, b);
    std::vector<int> tied;
    for (int i = 0; i < state.settings.n_bidders; ++i)
        if (bids[i] == best) tied.push_back(i);
    if (tied.size() > 1) {
        std::vector<int> losers;
        for (int i : tied)
            if (i != state.split_round1_winner) losers.push_back(i);
        if (!losers.empty()) tied = losers;
    }
    const int winner = detail::pick_uniform(tied, rng);

    RoundOutcome out;
    out.allocations.assign(state.settings.n_bidders, 0);
    out.payments.assign(state.settings.n_bidders, 0.0);
    out.cost_weights.assign(state.settings.n_bidders, 0.0);
    out.allocations[winner] = 1;
    out.payments[winner] = best;
    out.cost_weights[winner] = winner == state.split_round1_winner
                                   ? 1.0 - state.settings.scale_c
                                   : state.settings.scale_c;
    out.revealed_price = best;
    state.history.push_back(out);
    state.round += 1;
    state.terminal = true;
    return out;
}

enum class Round1Award { None, Split };

// Agent-visible slice of the state: own type plus the public history.
struct Observation {
    double own_type = 0.0;
    int round = 0;
    std::vector<double> revealed_prices;
    bool own_won = false;
    Round1Award own_round1_award = Round1Award::None;
    bool absorbing = false;

    std::vector<double> features(const AuctionSettings& s) const {
        std::vector<double> f(s.obs_dim(), 0.0);
        if (absorbing) return f;
        f[0] = own_type;
        if (round < s.n_rounds) f[1 + round] = 1.0;
        for (std::size_t k = 0; k < revealed_prices.size(); ++k)
            f[1 + s.n_rounds + k] = revealed_prices[k];
        f[1 + 2 * s.n_rounds] = own_won ? 1.0 : 0.0;
        f[2 + 2 * s.n_rounds] = own_round1_award == Round1Award::Split ? 1.0 : 0.0;
        return f;
    }

    static Observation terminal_marker() {
        Observation o;
        o.absorbing = true;
        return o;
    }
};

inline Observation observe(const AuctionState& state, int bidder) {
    if (bidder < 0 || bidder >= state.settings.n_bidders)
        throw std::invalid_argument("bidder index out of range");
    Observation o;
    o.own_type = state.types.theta[bidder];
    o.round = state.round;
    o.revealed_prices.reserve(state.history.size());
    for (const auto& h : state.history) o.revealed_prices.push_back(h.revealed_price);
    for (const auto& h : state.history)
        if (h.allocations[bidder] > 0) o.own_won = true;
    if (state.settings.kind == AuctionKind::SplitAward &&
        state.split_round1_winner == bidder)
        o.own_round1_award = Round1Award::Split;
    return o;
}

// One line per round: round index, bids, allocations, payments, revealed price.
inline void write_trace_line(std::ostream& os, int round,
                             const std::vector<double>& bids,
                             const RoundOutcome& out) {
    os << round;
    for (double b : bids) os << '\t' << b;
    for (int a : out.allocations) os << '\t' << a;
    for (double p : out.payments) os << '\t' << p;
    os << '\t' << out.revealed_price << '\n';
}

}  // namespace auctionrl
