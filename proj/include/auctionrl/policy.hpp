#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "auctionrl/mlp.hpp"

namespace auctionrl {

enum class Squash { AffineTanh, Identity };

namespace detail {

inline double softplus(double x) {
    if (x > 30.0) return x;
    return std::log1p(std::exp(x));
}

// log(1 - tanh(x)^2), stable for large |x|
inline double log_one_minus_tanh_sq(double x) {
    const double ax = std::abs(x);
    return 2.0 * (std::log(2.0) - ax - softplus(-2.0 * ax));
}

constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))

}  // namespace detail

// Gaussian policy with an optional affine-tanh squash onto [lo, hi] per
// action dimension. The trunk emits means followed by log standard
// deviations; log-stds are hard-clamped to keep densities non-degenerate.
struct GaussianPolicy {
    Mlp trunk;  // obs_dim -> 2 * action_dim
    int action_dim = 1;
    Squash squash = Squash::AffineTanh;
    double lo = 0.0;
    double hi = 1.0;
    double log_std_min = -20.0;
    double log_std_max = 2.0;

    static GaussianPolicy make(int obs_dim, const std::vector<int>& hidden,
                               int action_dim, Squash squash, double lo, double hi,
                               Rng& rng) {
        if (squash == Squash::AffineTanh && !(lo < hi))
            throw std::invalid_argument("squash range requires lo < hi");
        std::vector<int> sizes{obs_dim};
        for (int h : hidden) sizes.push_back(h);
        sizes.push_back(2 * action_dim);
        GaussianPolicy p;
        p.trunk = Mlp::make(sizes, rng);
        p.action_dim = action_dim;
        p.squash = squash;
        p.lo = lo;
        p.hi = hi;
        return p;
    }

    double half() const { return 0.5 * (hi - lo); }
    double mid() const { return 0.5 * (hi + lo); }

    struct Sample {
        Vector action;
        double log_prob = 0.0;
        Vector eps;       // pre-squash noise; fixes the reparameterized path
        Vector mean;
        Vector log_std;   // after clamping
        Vector x;         // mean + sigma * eps
        std::vector<bool> clamped;  // log-std hit the clamp this sample
    };

    Sample run_with_eps(const Vector& obs_features, const Vector& eps,
                        MlpCache* cache = nullptr) const {
        const Vector out = mlp_forward(trunk, obs_features, cache);
        Sample s;
        s.eps = eps;
        s.action.resize(action_dim);
        s.mean.resize(action_dim);
        s.log_std.resize(action_dim);
        s.x.resize(action_dim);
        s.clamped.resize(action_dim);
        for (int d = 0; d < action_dim; ++d) {
            const double m = out[d];
            double ls = out[action_dim + d];
            s.clamped[d] = ls < log_std_min || ls > log_std_max;
            ls = std::clamp(ls, log_std_min, log_std_max);
            const double sigma = std::exp(ls);
            const double x = m + sigma * eps[d];
            s.mean[d] = m;
            s.log_std[d] = ls;
            s.x[d] = x;
            s.log_prob += -0.5 * eps[d] * eps[d] - ls - detail::kLogSqrt2Pi;
            if (squash == Squash::AffineTanh) {
                s.action[d] = mid() + half() * std::tanh(x);
                s.log_prob -= std::log(half()) + detail::log_one_minus_tanh_sq(x);
            } else {
                s.action[d] = x;
            }
        }
        return s;
    }

    Sample sample(const Vector& obs_features, Rng& rng) const {
        std::normal_distribution<double> gauss(0.0, 1.0);
        Vector eps(action_dim);
        for (auto& e : eps) e = gauss(rng);
        return run_with_eps(obs_features, eps);
    }

    // Deployment action: the squashed mean.
    Vector mean_action(const Vector& obs_features) const {
        const Vector out = mlp_forward(trunk, obs_features);
        Vector a(action_dim);
        for (int d = 0; d < action_dim; ++d)
            a[d] = squash == Squash::AffineTanh
                       ? mid() + half() * std::tanh(out[d])
                       : out[d];
        return a;
    }

    double log_prob(const Vector& obs_features, const Vector& action) const {
        if (static_cast<int>(action.size()) != action_dim)
            throw std::invalid_argument("log_prob: action dim mismatch");
        const Vector out = mlp_forward(trunk, obs_features);
        double lp = 0.0;
        for (int d = 0; d < action_dim; ++d) {
            const double m = out[d];
            const double ls = std::clamp(out[action_dim + d], log_std_min, log_std_max);
            const double sigma = std::exp(ls);
            double x = action[d];
            if (squash == Squash::AffineTanh) {
                const double u = (action[d] - mid()) / half();
                if (!(u > -1.0 && u < 1.0))
                    throw std::invalid_argument("action at or outside squash range");
                x = std::atanh(u);
                lp -= std::log(half()) + detail::log_one_minus_tanh_sq(x);
            }
            const double z = (x - m) / sigma;
            lp += -0.5 * z * z - ls - detail::kLogSqrt2Pi;
        }
        return lp;
    }
};

}  // namespace auctionrl
