#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "auctionrl/auction.hpp"
#include "auctionrl/mlp.hpp"
#include "auctionrl/policy.hpp"
#include "auctionrl/replay.hpp"
#include "auctionrl/rollout.hpp"
#include "auctionrl/strategies.hpp"

namespace auctionrl {

struct TrainConfig {
    int epochs = 3000;
    int experience_episodes_per_epoch = 500;
    int update_steps_per_epoch = 200;
    int batch_size = 256;
    double gamma = 1.0;
    double actor_lr = 1e-3;
    double critic_lr = 3e-3;
    double target_entropy = -10.0;
    double tau = 0.005;
    double relabel_fraction = 0.5;
    unsigned long seed = 0;
    int parallel_envs = 500;  // worker cap; collection itself is serialized
    std::vector<int> policy_hidden{256, 256};
    std::vector<int> critic_hidden{256, 256};
    Squash squash = Squash::AffineTanh;
    double squash_lo = 0.0;
    double squash_hi = 1.0;
    double init_log_alpha = 0.0;
    double neg_bid_penalty = 1.0;  // only charged in Identity mode
    std::size_t buffer_capacity = 1'000'000;

    void validate() const {
        if (epochs < 0 || experience_episodes_per_epoch <= 0 ||
            update_steps_per_epoch <= 0 || batch_size <= 0)
            throw std::invalid_argument("train config counts must be positive");
        if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma outside [0,1]");
        if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("tau outside (0,1]");
        if (relabel_fraction < 0.0 || relabel_fraction > 1.0)
            throw std::invalid_argument("relabel_fraction outside [0,1]");
    }
};

struct TrainLogRow {
    int epoch = 0;
    double mean_reward = 0.0;
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    double alpha = 0.0;
    double entropy = 0.0;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class SacTrainer {
  public:
    SacTrainer(AuctionSettings settings, StrategyKind opponents, TrainConfig cfg)
        : settings_(std::move(settings)),
          opponents_(opponents),
          cfg_(std::move(cfg)),
          buffer_(cfg_.buffer_capacity),
          rng_(cfg_.seed) {
        settings_.validate();
        cfg_.validate();
        const int obs_dim = settings_.obs_dim();
        const int act_dim = settings_.action_dim();
        policy_ = GaussianPolicy::make(obs_dim, cfg_.policy_hidden, act_dim,
                                       cfg_.squash, cfg_.squash_lo, cfg_.squash_hi,
                                       rng_);
        std::vector<int> qsizes{obs_dim + act_dim};
        for (int h : cfg_.critic_hidden) qsizes.push_back(h);
        qsizes.push_back(1);
        q1_ = Mlp::make(qsizes, rng_);
        q2_ = Mlp::make(qsizes, rng_);
        q1_target_ = q1_;
        q2_target_ = q2_;
        opt_pi_ = AdamState::make(policy_.trunk, cfg_.actor_lr);
        opt_q1_ = AdamState::make(q1_, cfg_.critic_lr);
        opt_q2_ = AdamState::make(q2_, cfg_.critic_lr);
        opt_alpha_.lr = cfg_.actor_lr;
        log_alpha_ = cfg_.init_log_alpha;
        grad_pi_ = MlpGrad::zeros_like(policy_.trunk);
        grad_q1_ = MlpGrad::zeros_like(q1_);
        grad_q2_ = MlpGrad::zeros_like(q2_);
    }

    double alpha() const { return std::exp(log_alpha_); }
    double log_alpha() const { return log_alpha_; }
    const GaussianPolicy& policy() const { return policy_; }
    GaussianPolicy& policy() { return policy_; }
    const Mlp& q1() const { return q1_; }
    const Mlp& q2() const { return q2_; }
    Mlp& q1() { return q1_; }
    Mlp& q2() { return q2_; }
    const Mlp& q1_target() const { return q1_target_; }
    const Mlp& q2_target() const { return q2_target_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    ReplayBuffer& buffer() { return buffer_; }
    Rng& rng() { return rng_; }
    const AuctionSettings& settings() const { return settings_; }
    const TrainConfig& config() const { return cfg_; }

    // Sampling behaviour policy used for experience collection.
    LearnerFn sampling_learner() {
        return [this](const Observation& obs) {
            return policy_.sample(obs.features(settings_), rng_).action;
        };
    }

    double min_q(const Mlp& qa, const Mlp& qb, const Vector& obs_feats,
                 const Vector& action) const {
        Vector in = obs_feats;
        in.insert(in.end(), action.begin(), action.end());
        return std::min(mlp_forward(qa, in)[0], mlp_forward(qb, in)[0]);
    }

    // Bootstrap target y = r + gamma (min target Q(s', a') - alpha log pi(a'|s'))
    // with a' freshly drawn from the live policy; terminal records skip the
    // bootstrap entirely.
    std::vector<double> critic_targets(const std::vector<TransitionRecord>& batch) {
        std::vector<double> y;
        y.reserve(batch.size());
        for (const auto& rec : batch) {
            if (rec.terminal || cfg_.gamma == 0.0) {
                y.push_back(rec.reward);
                continue;
            }
            const Vector feats = rec.next_obs.features(settings_);
            const auto s = policy_.sample(feats, rng_);
            const double q = min_q(q1_target_, q2_target_, feats, s.action);
            y.push_back(rec.reward + cfg_.gamma * (q - alpha() * s.log_prob));
        }
        return y;
    }

    // One Adam step per critic on the mean squared Bellman error. Returns the
    // pre-step loss averaged over both critics.
    double critic_update(const std::vector<TransitionRecord>& batch,
                         const std::vector<double>& targets) {
        const double inv_b = 1.0 / static_cast<double>(batch.size());
        double loss = 0.0;
        for (Mlp* q : {&q1_, &q2_}) {
            MlpGrad& grad = q == &q1_ ? grad_q1_ : grad_q2_;
            grad.zero();
            double l = 0.0;
            MlpCache cache;
            for (std::size_t i = 0; i < batch.size(); ++i) {
                Vector in = batch[i].obs.features(settings_);
                in.insert(in.end(), batch[i].action.begin(), batch[i].action.end());
                const double pred = mlp_forward(*q, in, &cache)[0];
                const double err = pred - targets[i];
                l += err * err * inv_b;
                mlp_backward(*q, cache, {2.0 * err * inv_b}, grad);
            }
            (q == &q1_ ? opt_q1_ : opt_q2_).step(*q, grad);
            loss += 0.5 * l;
        }
        return loss;
    }

    // One reparameterized step on E[alpha log pi(a|O) - min Q(O, a)].
    // Returns {loss, mean log prob of the fresh samples}.
    std::pair<double, double> actor_update(const std::vector<TransitionRecord>& batch) {
        const double inv_b = 1.0 / static_cast<double>(batch.size());
        const double a_coef = alpha();
        const int dim = policy_.action_dim;
        grad_pi_.zero();
        double loss = 0.0, sum_logp = 0.0;
        std::normal_distribution<double> gauss(0.0, 1.0);
        MlpCache pi_cache, q_cache, q_cache2;
        for (const auto& rec : batch) {
            const Vector feats = rec.obs.features(settings_);
            Vector eps(dim);
            for (auto& e : eps) e = gauss(rng_);
            const auto s = policy_.run_with_eps(feats, eps, &pi_cache);

            Vector in = feats;
            in.insert(in.end(), s.action.begin(), s.action.end());
            const double qa = mlp_forward(q1_, in, &q_cache)[0];
            const double qb = mlp_forward(q2_, in, &q_cache2)[0];
            const bool use1 = qa <= qb;
            const double qv = use1 ? qa : qb;

            loss += (a_coef * s.log_prob - qv) * inv_b;
            sum_logp += s.log_prob;

            // dL/da via the chosen critic's input gradient
            const Vector in_grad = mlp_input_gradient(
                use1 ? q1_ : q2_, use1 ? q_cache : q_cache2, {-inv_b});

            Vector upstream(2 * dim, 0.0);
            for (int d = 0; d < dim; ++d) {
                const double gq = in_grad[feats.size() + d];
                const double sig_eps = std::exp(s.log_std[d]) * eps[d];
                double dx;
                if (policy_.squash == Squash::AffineTanh) {
                    const double t = std::tanh(s.x[d]);
                    const double da_dx = policy_.half() * (1.0 - t * t);
                    dx = gq * da_dx + a_coef * inv_b * 2.0 * t;
                } else {
                    dx = gq;
                }
                upstream[d] = dx;
                upstream[dim + d] =
                    s.clamped[d] ? 0.0 : dx * sig_eps - a_coef * inv_b;
            }
            mlp_backward(policy_.trunk, pi_cache, upstream, grad_pi_);
        }
        opt_pi_.step(policy_.trunk, grad_pi_);
        return {loss, sum_logp * inv_b};
    }

    // Dual-gradient temperature adjustment toward the entropy target.
    void temperature_update(double mean_log_prob) {
        const double g = -(mean_log_prob + cfg_.target_entropy);
        opt_alpha_.step(log_alpha_, g);
    }

    void polyak_step() {
        polyak_update(q1_target_, q1_, cfg_.tau);
        polyak_update(q2_target_, q2_, cfg_.tau);
    }

    TrainLogRow update_once() {
        const auto batch = sample_minibatch(buffer_, cfg_.batch_size,
                                            cfg_.relabel_fraction, settings_, rng_);
        const auto y = critic_targets(batch);
        TrainLogRow row;
        row.critic_loss = critic_update(batch, y);
        const auto [aloss, mean_logp] = actor_update(batch);
        row.actor_loss = aloss;
        row.entropy = -mean_logp;
        temperature_update(mean_logp);
        polyak_step();
        row.alpha = alpha();
        return row;
    }

    // Full training loop: collect, replay with relabeling, update.
    std::vector<TrainLogRow> train(
        const std::function<void(const TrainLogRow&)>& on_epoch = nullptr) {
        std::vector<TrainLogRow> log;
        const double penalty =
            policy_.squash == Squash::Identity ? cfg_.neg_bid_penalty : 0.0;
        for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
            double mean_ret = 0.0;
            auto recs = collect_experience(settings_, opponents_, sampling_learner(),
                                           cfg_.experience_episodes_per_epoch, rng_,
                                           episode_counter_, penalty, &mean_ret);
            episode_counter_ += cfg_.experience_episodes_per_epoch;
            for (auto& r : recs) buffer_.insert(std::move(r));

            TrainLogRow row;
            for (int u = 0; u < cfg_.update_steps_per_epoch; ++u) row = update_once();
            row.epoch = epoch;
            row.mean_reward = mean_ret;
            if (!std::isfinite(row.critic_loss) || !std::isfinite(row.actor_loss) ||
                !all_finite(policy_.trunk) || !all_finite(q1_) || !all_finite(q2_))
                throw DivergenceError("non-finite loss or parameters at epoch " +
                                      std::to_string(epoch));
            log.push_back(row);
            if (on_epoch) on_epoch(row);
        }
        return log;
    }

  private:
    AuctionSettings settings_;
    StrategyKind opponents_;
    TrainConfig cfg_;
    GaussianPolicy policy_;
    Mlp q1_, q2_, q1_target_, q2_target_;
    AdamState opt_pi_, opt_q1_, opt_q2_;
    ScalarAdam opt_alpha_;
    double log_alpha_ = 0.0;
    MlpGrad grad_pi_, grad_q1_, grad_q2_;
    ReplayBuffer buffer_;
    Rng rng_;
    long episode_counter_ = 0;
};

}  // namespace auctionrl
