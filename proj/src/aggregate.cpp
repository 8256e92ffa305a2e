#include "byrd/aggregate.hpp"

#include <algorithm>
#include <cblas.h>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace byrd {

namespace {

std::size_t check_inputs(const std::vector<GradVector>& grads) {
    if (grads.empty()) throw std::invalid_argument("no gradients to aggregate");
    const std::size_t d = grads[0].size();
    for (const auto& g : grads)
        if (g.size() != d) throw std::invalid_argument("gradient dimension mismatch");
    return d;
}

double l2_distance(const GradVector& a, const GradVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return std::sqrt(s);
}

double geomed_objective(const GradVector& m, const std::vector<GradVector>& grads) {
    double s = 0.0;
    for (const auto& g : grads) s += l2_distance(m, g);
    return s;
}

// Squared pairwise distances, either directly or through the Gram matrix
// (one dsyrk) when the inputs are large. The Gram route can go slightly
// negative from cancellation, hence the clamp.
std::vector<double> pairwise_sq_dists(const std::vector<GradVector>& grads) {
    const std::size_t n = grads.size();
    const std::size_t d = grads[0].size();
    std::vector<double> dist(n * n, 0.0);
    if (n * d < 200000) {
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    const double t = grads[i][k] - grads[j][k];
                    s += t * t;
                }
                dist[i * n + j] = dist[j * n + i] = s;
            }
        return dist;
    }
    std::vector<double> packed(n * d);
    for (std::size_t i = 0; i < n; ++i)
        std::memcpy(packed.data() + i * d, grads[i].data(), sizeof(double) * d);
    std::vector<double> gram(n * n, 0.0);
    cblas_dsyrk(CblasRowMajor, CblasUpper, CblasNoTrans, static_cast<int>(n),
                static_cast<int>(d), 1.0, packed.data(), static_cast<int>(d), 0.0,
                gram.data(), static_cast<int>(n));
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = gram[i * n + i] + gram[j * n + j] - 2.0 * gram[i * n + j];
            dist[i * n + j] = dist[j * n + i] = std::max(s, 0.0);
        }
    return dist;
}

} // namespace

GradVector agg_mean(const std::vector<GradVector>& grads) {
    const std::size_t d = check_inputs(grads);
    GradVector out(d, 0.0);
    for (const auto& g : grads)
        for (std::size_t i = 0; i < d; ++i) out[i] += g[i];
    const double n = static_cast<double>(grads.size());
    for (double& v : out) v /= n;
    return out;
}

GradVector agg_cwmed(const std::vector<GradVector>& grads) {
    const std::size_t d = check_inputs(grads);
    const std::size_t n = grads.size();
    GradVector out(d);
    std::vector<double> col(n);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < n; ++j) col[j] = grads[j][i];
        const std::size_t mid = n / 2;
        std::nth_element(col.begin(), col.begin() + mid, col.end());
        if (n % 2 == 1) {
            out[i] = col[mid];
        } else {
            const double hi = col[mid];
            const double lo = *std::max_element(col.begin(), col.begin() + mid);
            out[i] = 0.5 * (lo + hi);
        }
    }
    return out;
}

GradVector agg_geomed(const std::vector<GradVector>& grads, double tol, int max_iter,
                      std::vector<double>* objective_trace) {
    const std::size_t d = check_inputs(grads);
    if (tol <= 0.0) throw std::invalid_argument("geomed tol must be > 0");
    GradVector m = agg_mean(grads);
    if (objective_trace) {
        objective_trace->clear();
        objective_trace->push_back(geomed_objective(m, grads));
    }
    GradVector next(d);
    for (int it = 0; it < max_iter; ++it) {
        double wsum = 0.0;
        std::fill(next.begin(), next.end(), 0.0);
        for (const auto& g : grads) {
            const double w = 1.0 / std::max(l2_distance(m, g), 1e-12);
            wsum += w;
            for (std::size_t i = 0; i < d; ++i) next[i] += w * g[i];
        }
        double step = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            next[i] /= wsum;
            const double t = next[i] - m[i];
            step += t * t;
        }
        m.swap(next);
        if (objective_trace) objective_trace->push_back(geomed_objective(m, grads));
        if (std::sqrt(step) <= tol) break;
    }
    return m;
}

std::size_t krum_select_index(const std::vector<GradVector>& grads, int f) {
    check_inputs(grads);
    const std::size_t n = grads.size();
    if (f < 0) throw std::invalid_argument("krum f must be >= 0");
    if (n < static_cast<std::size_t>(f) + 3)
        throw std::invalid_argument("krum needs at least f + 3 gradients");
    const std::size_t neighbors = n - f - 2;

    const std::vector<double> dist = pairwise_sq_dists(grads);
    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<double> others(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t k = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) others[k++] = dist[i * n + j];
        std::nth_element(others.begin(), others.begin() + neighbors - 1, others.end());
        double score = 0.0;
        for (std::size_t j = 0; j < neighbors; ++j) score += others[j];
        if (score < best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

GradVector agg_krum(const std::vector<GradVector>& grads, int f) {
    return grads[krum_select_index(grads, f)];
}

GradVector aggregate(const AggregationRule& rule, const std::vector<GradVector>& grads) {
    switch (rule.kind) {
    case AggregationRule::Kind::Mean:
        return agg_mean(grads);
    case AggregationRule::Kind::CwMed:
        return agg_cwmed(grads);
    case AggregationRule::Kind::GeoMed:
        return agg_geomed(grads, rule.geomed_tol, rule.geomed_max_iter);
    case AggregationRule::Kind::Krum:
        return agg_krum(grads, rule.krum_f);
    }
    throw std::logic_error("unknown aggregation rule");
}

const char* rule_name(AggregationRule::Kind k) {
    switch (k) {
    case AggregationRule::Kind::Mean:
        return "mean";
    case AggregationRule::Kind::CwMed:
        return "cwmed";
    case AggregationRule::Kind::GeoMed:
        return "geomed";
    case AggregationRule::Kind::Krum:
        return "krum";
    }
    return "?";
}

} // namespace byrd
