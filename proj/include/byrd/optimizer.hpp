#ifndef BYRD_OPTIMIZER_HPP
#define BYRD_OPTIMIZER_HPP

#include "byrd/model.hpp"

#include <utility>
#include <vector>

namespace byrd {

// Server-side optimizer state: the model iterate plus the momentum
// buffer. z starts at zero; y is transient inside a step.
struct ServerState {
    ModelParams x;
    std::vector<double> z;
    double eta = 0.0;
    double beta = 0.0;
    long k = 0;
};

ServerState make_server_state(ModelParams x0, double eta, double beta);

// One momentum step:
//   z <- beta z + grad;  y <- beta z + grad;  x <- x - eta y.
// With beta = 0 this is exactly plain SGD.
void nesterov_step(ServerState& s, const GradVector& grad);

// Classical look-ahead form: y = x - eta g(x); x' = y + beta (y - y_prev).
// Exists to cross-check the recursion above (first step uses y_prev = x0).
std::pair<std::vector<double>, std::vector<double>>
classical_nesterov_step(const std::vector<double>& y_prev, const std::vector<double>& x,
                        const GradVector& grad_at_x, double eta, double beta);

// Max over k of the residual of the unrolled-momentum identity
//   (x_k - x_{k+1})/eta = (1+beta) g_k + sum_{t<k} beta^{k+1-t} g_t
// along a logged deterministic trajectory (needs >= 2 entries).
double unroll_identity_residual(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& history,
    double eta, double beta);

// Auxiliary sequence value at x_curr. `grad_step` is the aggregated
// gradient that was applied in the step producing x_curr; with that
// convention consecutive values satisfy v' - v = -eta grad / (1 - beta).
std::vector<double> aux_sequence_v(const std::vector<double>& x_curr,
                                   const std::vector<double>& x_prev,
                                   const GradVector& grad_step, double eta, double beta);

// Constants of the convergence statement, used as evaluable formulas.
struct TheoremParams {
    double sin_gamma = 0.0;
    double c1 = 1.0;
    double c2 = 0.0;
    double L = 1.0;
    double beta = 0.0;
    double eta = 0.0;
};

// Largest admissible learning rate
//   (1 - sin g)(1 - beta)^3 / (c1 L [L beta^4 + (1 - beta)^2]);
// returns 0 when sin_gamma >= 1 (no admissible stepsize).
double max_stepsize(const TheoremParams& tp);

// Non-vanishing error-floor term
//   eta L c2 / (1 - sin g) * [L beta^4 / (1 - beta)^3 + 2 / (1 - beta)].
double error_floor_bound(const TheoremParams& tp);

} // namespace byrd

#endif
