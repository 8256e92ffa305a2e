#include "byrd/resilience.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>

using namespace byrd;

TEST_SUITE("resilience") {

TEST_CASE("mean of unbiased noiseless gradients has sin_gamma ~ 0") {
    RngStream rng(1);
    ScenarioSpec sc;
    sc.base_grad = {1.0, -2.0, 0.5, 3.0};
    sc.scales = {0.5, 1.0, 2.0};
    sc.noise_std = 0.0;
    sc.n_honest = 5;
    const AggregationRule mean;
    const auto est = estimate_resilience(mean, sc, 40, rng);
    CHECK(est.sin_gamma_hat <= 1e-9);
    CHECK(est.trials == 40);
    CHECK(est.c1_hat >= 0.0);
    CHECK(est.c2_hat >= 0.0);
}

TEST_CASE("zero-gradient attack forces sin_gamma = 1 under mean") {
    RngStream rng(2);
    ScenarioSpec sc;
    sc.base_grad = {2.0, 1.0, -1.0};
    sc.noise_std = 0.0;
    sc.n_honest = 8;
    sc.n_byz = 2;
    sc.attack.kind = AttackKind::Kind::ZeroGradient;
    const AggregationRule mean;
    const auto est = estimate_resilience(mean, sc, 30, rng);
    CHECK(std::fabs(est.sin_gamma_hat - 1.0) <= 1e-9);
}

TEST_CASE("krum under sign flip keeps a descent correlation") {
    RngStream rng(3);
    ScenarioSpec sc;
    sc.base_grad = GradVector(10, 1.0);
    sc.noise_std = 0.5;
    sc.n_honest = 8;
    sc.n_byz = 2;
    sc.attack.kind = AttackKind::Kind::SignFlip;
    sc.attack.mu = -10.0;
    AggregationRule krum;
    krum.kind = AggregationRule::Kind::Krum;
    krum.krum_f = 2;
    const auto est = estimate_resilience(krum, sc, 1000, rng);
    CHECK(est.sin_gamma_hat < 0.5);
}

TEST_CASE("mean with noise: c1 near 1, envelope constants sane") {
    RngStream rng(4);
    ScenarioSpec sc;
    sc.base_grad = GradVector(6, 1.0);
    sc.scales = {0.5, 1.0, 2.0, 4.0};
    sc.noise_std = 0.3;
    sc.n_honest = 10;
    const AggregationRule mean;
    const auto est = estimate_resilience(mean, sc, 400, rng);
    // E|mean|^2 = |grad|^2 + sigma^2 d / H exactly; the secant slope
    // should recover c1 ~ 1 and a small positive c2.
    CHECK(est.c1_hat == doctest::Approx(1.0).epsilon(0.05));
    CHECK(est.c2_hat >= 0.0);
    CHECK(est.c2_hat <= 0.2);
    CHECK(est.sin_gamma_hat <= 0.05);
}

TEST_CASE("degenerate scenarios are rejected") {
    RngStream rng(5);
    ScenarioSpec sc;
    sc.base_grad = {1.0};
    const AggregationRule mean;
    CHECK_THROWS_AS((void)estimate_resilience(mean, sc, 10, rng),
                    std::invalid_argument);
    sc.scales = {0.0};
    CHECK_THROWS_AS((void)estimate_resilience(mean, sc, 30, rng), std::runtime_error);
    ScenarioSpec empty;
    empty.base_grad = {};
    CHECK_THROWS_AS((void)estimate_resilience(mean, empty, 30, rng),
                    std::invalid_argument);
}

} // TEST_SUITE
