#ifndef BYRD_RESILIENCE_HPP
#define BYRD_RESILIENCE_HPP

#include "byrd/aggregate.hpp"
#include "byrd/attack.hpp"
#include "byrd/rng.hpp"

namespace byrd {

// Synthetic sampling scenario for probing an aggregation rule: the true
// gradient direction, a sweep of magnitudes, honest-gradient noise, and
// the adversary population.
struct ScenarioSpec {
    GradVector base_grad;
    std::vector<double> scales{1.0};
    double noise_std = 0.0;
    int n_honest = 1;
    int n_byz = 0;
    AttackKind attack;
};

// Monte-Carlo estimates of the soft Byzantine-resilience constants:
// sin_gamma_hat measures how far the expected aggregate tilts away from
// the true gradient; (c1_hat, c2_hat) bound the aggregate's second moment
// by c1 * |grad|^2 + c2 across the sampled magnitudes.
struct ResilienceEstimate {
    double sin_gamma_hat = 0.0;
    double c1_hat = 0.0;
    double c2_hat = 0.0;
    int trials = 0;
};

ResilienceEstimate estimate_resilience(const AggregationRule& rule,
                                       const ScenarioSpec& scenario, int trials,
                                       RngStream& rng);

} // namespace byrd

#endif
