#include "byrd/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace byrd {

ServerState make_server_state(ModelParams x0, double eta, double beta) {
    if (eta <= 0.0) throw std::invalid_argument("eta must be > 0");
    if (beta < 0.0 || beta >= 1.0) throw std::invalid_argument("beta must be in [0,1)");
    ServerState s;
    s.z.assign(x0.values.size(), 0.0);
    s.x = std::move(x0);
    s.eta = eta;
    s.beta = beta;
    s.k = 0;
    return s;
}

void nesterov_step(ServerState& s, const GradVector& grad) {
    if (grad.size() != s.x.values.size())
        throw std::invalid_argument("gradient dimension mismatch");
    for (double g : grad)
        if (!std::isfinite(g)) throw std::runtime_error("non-finite gradient");
    const double beta = s.beta;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        s.z[i] = beta * s.z[i] + grad[i];
        const double y = beta * s.z[i] + grad[i];
        s.x.values[i] -= s.eta * y;
    }
    ++s.k;
}

std::pair<std::vector<double>, std::vector<double>>
classical_nesterov_step(const std::vector<double>& y_prev, const std::vector<double>& x,
                        const GradVector& grad_at_x, double eta, double beta) {
    if (x.size() != grad_at_x.size() || x.size() != y_prev.size())
        throw std::invalid_argument("dimension mismatch");
    std::vector<double> y(x.size()), x_next(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] - eta * grad_at_x[i];
        x_next[i] = y[i] + beta * (y[i] - y_prev[i]);
    }
    return {std::move(x_next), std::move(y)};
}

double unroll_identity_residual(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& history,
    double eta, double beta) {
    if (history.size() < 2) throw std::invalid_argument("history too short");
    const std::size_t d = history[0].first.size();
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < history.size(); ++k) {
        const auto& [x_k, g_k] = history[k];
        const auto& x_next = history[k + 1].first;
        double sq = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double rhs = (1.0 + beta) * g_k[i];
            // sum_{t=0}^{k-1} beta^{k+1-t} g_t, built from t = k-1 down.
            double pw = beta * beta;
            for (std::size_t t = k; t-- > 0; pw *= beta)
                rhs += pw * history[t].second[i];
            const double r = (x_k[i] - x_next[i]) / eta - rhs;
            sq += r * r;
        }
        worst = std::max(worst, std::sqrt(sq));
    }
    return worst;
}

std::vector<double> aux_sequence_v(const std::vector<double>& x_curr,
                                   const std::vector<double>& x_prev,
                                   const GradVector& grad_step, double eta, double beta) {
    if (x_curr.size() != x_prev.size() || x_curr.size() != grad_step.size())
        throw std::invalid_argument("dimension mismatch");
    if (beta >= 1.0) throw std::invalid_argument("beta must be < 1");
    const double inv = 1.0 / (1.0 - beta);
    std::vector<double> v(x_curr.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = inv * (x_curr[i] - beta * x_prev[i] + eta * beta * grad_step[i]);
    return v;
}

double max_stepsize(const TheoremParams& tp) {
    if (tp.c1 <= 0.0 || tp.L <= 0.0) throw std::invalid_argument("need c1 > 0 and L > 0");
    if (tp.beta < 0.0 || tp.beta >= 1.0) throw std::invalid_argument("beta must be in [0,1)");
    if (tp.sin_gamma >= 1.0) return 0.0;
    const double omb = 1.0 - tp.beta;
    const double b4 = tp.beta * tp.beta * tp.beta * tp.beta;
    return (1.0 - tp.sin_gamma) * omb * omb * omb /
           (tp.c1 * tp.L * (tp.L * b4 + omb * omb));
}

double error_floor_bound(const TheoremParams& tp) {
    if (tp.beta >= 1.0) throw std::invalid_argument("beta must be < 1");
    if (tp.sin_gamma >= 1.0) throw std::invalid_argument("sin_gamma must be < 1");
    const double omb = 1.0 - tp.beta;
    const double b4 = tp.beta * tp.beta * tp.beta * tp.beta;
    return tp.eta * tp.L * tp.c2 / (1.0 - tp.sin_gamma) *
           (tp.L * b4 / (omb * omb * omb) + 2.0 / omb);
}

} // namespace byrd
