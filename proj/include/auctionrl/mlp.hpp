#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "auctionrl/auction.hpp"  // Rng

namespace auctionrl {

// Row-major dense matrix, just enough for small feed-forward nets.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

using Vector = std::vector<double>;

struct Layer {
    Matrix w;   // out x in
    Vector b;   // out
};

struct Mlp {
    std::vector<Layer> layers;  // ReLU between layers, linear output

    int in_dim() const { return layers.front().w.cols; }
    int out_dim() const { return layers.back().w.rows; }

    // Fan-in scaled uniform init.
    static Mlp make(const std::vector<int>& sizes, Rng& rng) {
        if (sizes.size() < 2) throw std::invalid_argument("need input and output size");
        Mlp net;
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
            Layer layer;
            layer.w = Matrix(sizes[l + 1], sizes[l]);
            layer.b.assign(sizes[l + 1], 0.0);
            const double bound = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
            std::uniform_real_distribution<double> dist(-bound, bound);
            for (auto& v : layer.w.data) v = dist(rng);
            for (auto& v : layer.b) v = dist(rng);
            net.layers.push_back(std::move(layer));
        }
        return net;
    }

    std::vector<int> sizes() const {
        std::vector<int> s{in_dim()};
        for (const auto& l : layers) s.push_back(l.w.rows);
        return s;
    }
};

struct MlpCache {
    Vector input;
    std::vector<Vector> pre;   // pre-activation per layer
    std::vector<Vector> post;  // post-activation per layer (last == output)
};

inline Vector mlp_forward(const Mlp& net, const Vector& input, MlpCache* cache = nullptr) {
    if (static_cast<int>(input.size()) != net.in_dim())
        throw std::invalid_argument("mlp_forward: input size mismatch");
    if (cache) {
        cache->input = input;
        cache->pre.clear();
        cache->post.clear();
    }
    Vector x = input;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        Vector y(layer.w.rows);
        for (int r = 0; r < layer.w.rows; ++r) {
            double acc = layer.b[r];
            const double* wrow = &layer.w.data[static_cast<std::size_t>(r) * layer.w.cols];
            for (int c = 0; c < layer.w.cols; ++c) acc += wrow[c] * x[c];
            y[r] = acc;
        }
        if (cache) cache->pre.push_back(y);
        if (l + 1 < net.layers.size())
            for (auto& v : y) v = v > 0.0 ? v : 0.0;
        if (cache) cache->post.push_back(y);
        x = std::move(y);
    }
    return x;
}

// Parameter-shaped gradient accumulator.
struct MlpGrad {
    std::vector<Layer> layers;

    static MlpGrad zeros_like(const Mlp& net) {
        MlpGrad g;
        for (const auto& l : net.layers) {
            Layer gl;
            gl.w = Matrix(l.w.rows, l.w.cols);
            gl.b.assign(l.b.size(), 0.0);
            g.layers.push_back(std::move(gl));
        }
        return g;
    }

    void zero() {
        for (auto& l : layers) {
            std::fill(l.w.data.begin(), l.w.data.end(), 0.0);
            std::fill(l.b.begin(), l.b.end(), 0.0);
        }
    }

    void scale(double a) {
        for (auto& l : layers) {
            for (auto& v : l.w.data) v *= a;
            for (auto& v : l.b) v *= a;
        }
    }
};

// Exact reverse-mode pass; accumulates parameter gradients into `grad` and
// optionally writes the gradient w.r.t. the input.
inline void mlp_backward(const Mlp& net, const MlpCache& cache, const Vector& upstream,
                         MlpGrad& grad, Vector* input_grad = nullptr) {
    if (static_cast<int>(upstream.size()) != net.out_dim())
        throw std::invalid_argument("mlp_backward: upstream size mismatch");
    Vector delta = upstream;
    for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
        const Layer& layer = net.layers[l];
        Layer& glayer = grad.layers[l];
        const Vector& x = l == 0 ? cache.input : cache.post[l - 1];
        for (int r = 0; r < layer.w.rows; ++r) {
            const double d = delta[r];
            glayer.b[r] += d;
            double* grow = &glayer.w.data[static_cast<std::size_t>(r) * layer.w.cols];
            for (int c = 0; c < layer.w.cols; ++c) grow[c] += d * x[c];
        }
        if (l == 0 && input_grad == nullptr) break;
        Vector prev(layer.w.cols, 0.0);
        for (int r = 0; r < layer.w.rows; ++r) {
            const double d = delta[r];
            const double* wrow = &layer.w.data[static_cast<std::size_t>(r) * layer.w.cols];
            for (int c = 0; c < layer.w.cols; ++c) prev[c] += d * wrow[c];
        }
        if (l == 0) {
            *input_grad = std::move(prev);
            return;
        }
        // ReLU derivative at the previous layer's pre-activation
        for (int c = 0; c < layer.w.cols; ++c)
            if (cache.pre[l - 1][c] <= 0.0) prev[c] = 0.0;
        delta = std::move(prev);
    }
}

// Gradient w.r.t. the input only, with parameters held fixed.
inline Vector mlp_input_gradient(const Mlp& net, const MlpCache& cache,
                                 const Vector& upstream) {
    Vector delta = upstream;
    for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
        const Layer& layer = net.layers[l];
        Vector prev(layer.w.cols, 0.0);
        for (int r = 0; r < layer.w.rows; ++r) {
            const double d = delta[r];
            const double* wrow = &layer.w.data[static_cast<std::size_t>(r) * layer.w.cols];
            for (int c = 0; c < layer.w.cols; ++c) prev[c] += d * wrow[c];
        }
        if (l > 0)
            for (int c = 0; c < layer.w.cols; ++c)
                if (cache.pre[l - 1][c] <= 0.0) prev[c] = 0.0;
        delta = std::move(prev);
    }
    return delta;
}

// Bias-corrected adaptive-moment optimizer over one Mlp.
struct AdamState {
    MlpGrad m;
    MlpGrad v;
    long step_count = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState make(const Mlp& net, double lr) {
        AdamState s;
        s.m = MlpGrad::zeros_like(net);
        s.v = MlpGrad::zeros_like(net);
        s.lr = lr;
        return s;
    }

    void step(Mlp& net, const MlpGrad& grad) {
        step_count += 1;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            auto upd = [&](double& p, double& mm, double& vv, double g) {
                mm = beta1 * mm + (1.0 - beta1) * g;
                vv = beta2 * vv + (1.0 - beta2) * g * g;
                p -= lr * (mm / bc1) / (std::sqrt(vv / bc2) + eps);
            };
            auto& wl = net.layers[l];
            for (std::size_t i = 0; i < wl.w.data.size(); ++i)
                upd(wl.w.data[i], m.layers[l].w.data[i], v.layers[l].w.data[i],
                    grad.layers[l].w.data[i]);
            for (std::size_t i = 0; i < wl.b.size(); ++i)
                upd(wl.b[i], m.layers[l].b[i], v.layers[l].b[i], grad.layers[l].b[i]);
        }
    }
};

// Scalar variant, used for the entropy temperature.
struct ScalarAdam {
    double m = 0.0;
    double v = 0.0;
    long step_count = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void step(double& p, double g) {
        step_count += 1;
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        const double mh = m / (1.0 - std::pow(beta1, static_cast<double>(step_count)));
        const double vh = v / (1.0 - std::pow(beta2, static_cast<double>(step_count)));
        p -= lr * mh / (std::sqrt(vh) + eps);
    }
};

inline void polyak_update(Mlp& target, const Mlp& online, double tau) {
    if (target.layers.size() != online.layers.size())
        throw std::invalid_argument("polyak_update: shape mismatch");
    for (std::size_t l = 0; l < target.layers.size(); ++l) {
        auto& t = target.layers[l];
        const auto& o = online.layers[l];
        if (t.w.data.size() != o.w.data.size() || t.b.size() != o.b.size())
            throw std::invalid_argument("polyak_update: shape mismatch");
        // Incremental form: exact fixed point when target == online; tau = 1
        // is an exact copy.
        if (tau == 1.0) {
            t.w.data = o.w.data;
            t.b = o.b;
            continue;
        }
        for (std::size_t i = 0; i < t.w.data.size(); ++i)
            t.w.data[i] += tau * (o.w.data[i] - t.w.data[i]);
        for (std::size_t i = 0; i < t.b.size(); ++i)
            t.b[i] += tau * (o.b[i] - t.b[i]);
    }
}

inline bool all_finite(const Mlp& net) {
    for (const auto& l : net.layers) {
        for (double v : l.w.data)
            if (!std::isfinite(v)) return false;
        for (double v : l.b)
            if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace auctionrl
