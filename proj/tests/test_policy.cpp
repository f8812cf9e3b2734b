#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "auctionrl/policy.hpp"
#include "auctionrl/quadrature.hpp"

using namespace auctionrl;

namespace {

// Single linear layer with zeroed weights so the head is a constant
// (mean, log_std) pair regardless of the observation.
GaussianPolicy constant_policy(double mean, double log_std, Squash squash,
                               double lo, double hi) {
    Rng rng(0);
    GaussianPolicy p = GaussianPolicy::make(1, {}, 1, squash, lo, hi, rng);
    auto& layer = p.trunk.layers[0];
    std::fill(layer.w.data.begin(), layer.w.data.end(), 0.0);
    layer.b = {mean, log_std};
    return p;
}

}  // namespace

TEST_CASE("squashed mean action lands at mid plus half tanh") {
    const auto p = constant_policy(0.3, -1.0, Squash::AffineTanh, 0.0, 1.0);
    const auto a = p.mean_action({0.7});
    CHECK(a[0] == Catch::Approx(0.5 + 0.5 * std::tanh(0.3)).epsilon(1e-12));

    const auto q = constant_policy(0.3, -1.0, Squash::Identity, 0.0, 1.0);
    CHECK(q.mean_action({0.7})[0] == Catch::Approx(0.3));
}

TEST_CASE("the reparameterized path is a deterministic function of eps") {
    const auto p = constant_policy(0.1, -0.7, Squash::AffineTanh, 0.0, 2.0);
    const auto a = p.run_with_eps({0.4}, {1.3});
    const auto b = p.run_with_eps({0.4}, {1.3});
    CHECK(a.action[0] == b.action[0]);
    CHECK(a.log_prob == b.log_prob);
    // manual reconstruction
    const double sigma = std::exp(-0.7);
    const double x = 0.1 + sigma * 1.3;
    CHECK(a.x[0] == Catch::Approx(x).epsilon(1e-12));
    CHECK(a.action[0] == Catch::Approx(1.0 + 1.0 * std::tanh(x)).epsilon(1e-12));
}

TEST_CASE("squashed density integrates to one over the action interval") {
    const auto p = constant_policy(0.0, std::log(0.5), Squash::AffineTanh, 0.0, 1.0);
    const Vector obs{0.2};
    const double mass = integrate(
        [&](double a) { return std::exp(p.log_prob(obs, {a})); }, 1e-9, 1.0 - 1e-9,
        1e-10);
    CHECK(mass == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("identity density integrates to one over the real line") {
    const auto p = constant_policy(0.2, std::log(0.4), Squash::Identity, 0.0, 1.0);
    const Vector obs{0.0};
    const double mass = integrate(
        [&](double a) { return std::exp(p.log_prob(obs, {a})); }, 0.2 - 8.0 * 0.4,
        0.2 + 8.0 * 0.4, 1e-10);
    CHECK(mass == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("sampled actions score back to their own log probability") {
    const auto p = constant_policy(-0.2, std::log(0.6), Squash::AffineTanh, 0.0, 4.0);
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto s = p.sample({0.9}, rng);
        CHECK(s.action[0] > 0.0);
        CHECK(s.action[0] < 4.0);
        CHECK(p.log_prob({0.9}, s.action) == Catch::Approx(s.log_prob).margin(1e-9));
    }
}

TEST_CASE("identity sample log probability matches the gaussian formula") {
    const double m = 0.3, ls = -0.4;
    const auto p = constant_policy(m, ls, Squash::Identity, 0.0, 1.0);
    const auto s = p.run_with_eps({0.0}, {0.8});
    const double sigma = std::exp(ls);
    const double z = (s.action[0] - m) / sigma;
    const double expect = -0.5 * z * z - ls - 0.9189385332046727;
    CHECK(s.log_prob == Catch::Approx(expect).epsilon(1e-12));
    CHECK(p.log_prob({0.0}, s.action) == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("monte carlo entropy is self-consistent with the analytic gaussian") {
    const double ls = -0.3;
    const auto p = constant_policy(0.0, ls, Squash::Identity, 0.0, 1.0);
    Rng rng(5);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += -p.sample({0.0}, rng).log_prob;
    const double analytic = 0.5 * (1.0 + std::log(2.0 * M_PI)) + ls;
    CHECK(sum / n == Catch::Approx(analytic).margin(0.01));
}

TEST_CASE("a wider policy assigns lower density near its mean") {
    const auto narrow = constant_policy(0.0, -1.0, Squash::AffineTanh, 0.0, 1.0);
    const auto wide = constant_policy(0.0, 0.5, Squash::AffineTanh, 0.0, 1.0);
    CHECK(narrow.log_prob({0.0}, {0.5}) > wide.log_prob({0.0}, {0.5}));
}

TEST_CASE("log-std clamp engages and is reported") {
    const auto hi = constant_policy(0.0, 5.0, Squash::AffineTanh, 0.0, 1.0);
    const auto s = hi.run_with_eps({0.0}, {0.1});
    CHECK(s.clamped[0]);
    CHECK(s.log_std[0] == 2.0);

    const auto lo = constant_policy(0.0, -30.0, Squash::AffineTanh, 0.0, 1.0);
    const auto t = lo.run_with_eps({0.0}, {0.1});
    CHECK(t.clamped[0]);
    CHECK(t.log_std[0] == -20.0);

    const auto ok = constant_policy(0.0, 0.0, Squash::AffineTanh, 0.0, 1.0);
    CHECK_FALSE(ok.run_with_eps({0.0}, {0.1}).clamped[0]);
}

TEST_CASE("actions outside the squash range are rejected when scoring") {
    const auto p = constant_policy(0.0, 0.0, Squash::AffineTanh, 0.0, 1.0);
    CHECK_THROWS_AS(p.log_prob({0.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(p.log_prob({0.0}, {-0.1}), std::invalid_argument);
    CHECK_THROWS_AS(p.log_prob({0.0}, {0.3, 0.3}), std::invalid_argument);
}

TEST_CASE("degenerate squash ranges are rejected at construction") {
    Rng rng(0);
    CHECK_THROWS_AS(GaussianPolicy::make(1, {4}, 1, Squash::AffineTanh, 1.0, 1.0, rng),
                    std::invalid_argument);
}
