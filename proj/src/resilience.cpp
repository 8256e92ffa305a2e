#include "byrd/resilience.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace byrd {

ResilienceEstimate estimate_resilience(const AggregationRule& rule,
                                       const ScenarioSpec& scenario, int trials,
                                       RngStream& rng) {
    if (trials < 30) throw std::invalid_argument("need at least 30 trials");
    if (scenario.n_honest < 1) throw std::invalid_argument("need honest workers");
    if (scenario.base_grad.empty()) throw std::invalid_argument("empty base gradient");
    const std::size_t d = scenario.base_grad.size();

    // One probe per magnitude: (x = |grad|^2, y = mean |agg|^2, sin).
    struct Point {
        double x, y, sin_g;
    };
    std::vector<Point> points;
    for (double scale : scenario.scales) {
        GradVector true_grad(d);
        double x = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            true_grad[i] = scale * scenario.base_grad[i];
            x += true_grad[i] * true_grad[i];
        }
        if (x == 0.0) continue; // degenerate point, skipped

        GradVector agg_sum(d, 0.0);
        double sq_sum = 0.0;
        for (int t = 0; t < trials; ++t) {
            std::vector<GradVector> honest(scenario.n_honest, true_grad);
            if (scenario.noise_std > 0.0)
                for (auto& g : honest)
                    for (double& v : g) v += scenario.noise_std * rng.next_normal();
            const std::vector<GradVector> uploads =
                scenario.n_byz == 0 ? honest
                                    : apply_attack(scenario.attack, honest,
                                                   scenario.n_byz, rng);
            const GradVector agg = aggregate(rule, uploads);
            double sq = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                agg_sum[i] += agg[i];
                sq += agg[i] * agg[i];
            }
            sq_sum += sq;
        }
        double inner = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            inner += (agg_sum[i] / trials) * true_grad[i];
        points.push_back({x, sq_sum / trials, 1.0 - inner / x});
    }
    if (points.empty())
        throw std::runtime_error("all scenario points had a zero true gradient");

    ResilienceEstimate est;
    est.trials = trials;
    double worst = 0.0;
    for (const Point& p : points) worst = std::max(worst, p.sin_g);
    est.sin_gamma_hat = std::clamp(worst, 0.0, 1.0);

    // Least upper envelope y <= c1 x + c2 over the sampled magnitudes:
    // secant slope between the extreme magnitudes, then the smallest
    // intercept that clears every point.
    auto [lo, hi] = std::minmax_element(
        points.begin(), points.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    double c1 = 0.0;
    if (hi->x > lo->x) c1 = std::max(0.0, (hi->y - lo->y) / (hi->x - lo->x));
    else c1 = lo->y / lo->x;
    double c2 = 0.0;
    for (const Point& p : points) c2 = std::max(c2, p.y - c1 * p.x);
    est.c1_hat = c1;
    est.c2_hat = c2;
    return est;
}

} // namespace byrd
