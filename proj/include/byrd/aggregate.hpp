#ifndef BYRD_AGGREGATE_HPP
#define BYRD_AGGREGATE_HPP

#include "byrd/model.hpp"

#include <vector>

namespace byrd {

struct AggregationRule {
    enum class Kind { Mean, CwMed, GeoMed, Krum };
    Kind kind = Kind::Mean;
    double geomed_tol = 1e-6;
    int geomed_max_iter = 100;
    int krum_f = 0; // assumed Byzantine count
    bool operator==(const AggregationRule&) const = default;
};

// Coordinate-wise arithmetic mean, summed in upload order.
GradVector agg_mean(const std::vector<GradVector>& grads);

// Per-coordinate median; even counts average the two middle order
// statistics.
GradVector agg_cwmed(const std::vector<GradVector>& grads);

// Smoothed Weiszfeld iteration for the geometric median, started at the
// coordinate-wise mean with distance denominators floored at 1e-12.
// Stops when the step norm drops to `tol` or after `max_iter` rounds.
// `objective_trace`, when given, receives the objective sum before the
// first update and after every update.
GradVector agg_geomed(const std::vector<GradVector>& grads, double tol, int max_iter,
                      std::vector<double>* objective_trace = nullptr);

// Krum: each candidate is scored by the summed squared distances to its
// N-f-2 nearest peers; the lowest score wins, ties to the lowest index.
// Requires N >= f + 3. The returned vector is one of the inputs verbatim.
GradVector agg_krum(const std::vector<GradVector>& grads, int f);
std::size_t krum_select_index(const std::vector<GradVector>& grads, int f);

GradVector aggregate(const AggregationRule& rule, const std::vector<GradVector>& grads);

const char* rule_name(AggregationRule::Kind k);

} // namespace byrd

#endif
