#pragma once

#include <random>
#include <stdexcept>
#include <vector>

#include "auctionrl/auction.hpp"
#include "auctionrl/rollout.hpp"

namespace auctionrl {

// Bounded FIFO store of transitions.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity = 1'000'000) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("capacity must be positive");
    }

    void insert(TransitionRecord rec) {
        if (store_.size() < capacity_) {
            store_.push_back(std::move(rec));
        } else {
            store_[write_pos_ % capacity_] = std::move(rec);
        }
        write_pos_ += 1;
    }

    std::size_t size() const { return store_.size(); }
    std::size_t inserted() const { return write_pos_; }
    const TransitionRecord& at(std::size_t i) const { return store_.at(i); }

    const TransitionRecord& sample_one(Rng& rng) const {
        if (store_.empty()) throw std::logic_error("sample from empty buffer");
        std::uniform_int_distribution<std::size_t> d(0, store_.size() - 1);
        return store_[d(rng)];
    }

  private:
    std::size_t capacity_;
    std::size_t write_pos_ = 0;
    std::vector<TransitionRecord> store_;
};

// Rewrites a stored transition for a different own type. Allocations and
// payments depend only on the bids, so only the type slots and the reward
// change; the reward recomputation shares the environment's arithmetic.
inline TransitionRecord relabel(const TransitionRecord& rec, double new_type,
                                const AuctionSettings& settings) {
    if (new_type < settings.type_lo || new_type > settings.type_hi)
        throw std::invalid_argument("relabel type out of bounds");
    TransitionRecord out = rec;
    out.obs.own_type = new_type;
    if (!out.next_obs.absorbing) out.next_obs.own_type = new_type;
    out.reward = quasi_linear_reward(settings.kind, new_type, rec.alloc,
                                     rec.payment, rec.cost_weight) -
                 rec.bid_penalty;
    return out;
}

// Uniform minibatch where an independent fraction of draws is relabeled with
// a fresh type from the prior.
inline std::vector<TransitionRecord> sample_minibatch(const ReplayBuffer& buffer,
                                                      int batch_size,
                                                      double relabel_fraction,
                                                      const AuctionSettings& settings,
                                                      Rng& rng) {
    if (buffer.size() == 0) throw std::logic_error("sample from empty buffer");
    if (relabel_fraction < 0.0 || relabel_fraction > 1.0)
        throw std::invalid_argument("relabel_fraction outside [0,1]");
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_real_distribution<double> type_dist(settings.type_lo, settings.type_hi);
    std::vector<TransitionRecord> batch;
    batch.reserve(batch_size);
    for (int i = 0; i < batch_size; ++i) {
        const TransitionRecord& rec = buffer.sample_one(rng);
        if (relabel_fraction > 0.0 && coin(rng) < relabel_fraction) {
            batch.push_back(relabel(rec, type_dist(rng), settings));
        } else {
            batch.push_back(rec);
        }
    }
    return batch;
}

}  // namespace auctionrl
