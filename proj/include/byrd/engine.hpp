#ifndef BYRD_ENGINE_HPP
#define BYRD_ENGINE_HPP

#include "byrd/aggregate.hpp"
#include "byrd/attack.hpp"
#include "byrd/data.hpp"
#include "byrd/model.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace byrd {

enum class OptimizerKind { Sgd, Nesterov };

struct DatasetSpec {
    enum class Kind { Covtype, Mnist, SynthBinary, SynthClass10 };
    Kind kind = Kind::SynthBinary;
    std::string path;                       // covtype source file
    std::string train_images, train_labels; // mnist sources
    std::string test_images, test_labels;
    double split_fraction = 0.8; // covtype / synth
    bool minmax_scale = false;   // covtype numeric columns
    int synth_n = 1000;
    int synth_dim = 20;
    long limit_train = 0; // keep only the first N training samples (0 = all)

    std::string cache_key() const;
    bool operator==(const DatasetSpec&) const = default;
};

// Full description of one experiment. Every random draw in a run derives
// from `seed` (see the stream map written into summary.txt).
struct RunConfig {
    int n_workers = 100;
    double byz_ratio = 0.0;
    long iterations = 1;
    double eta = 0.005;
    double beta = 0.9;
    int batch_size = 64;
    std::uint64_t seed = 1;
    AggregationRule rule;
    AttackKind attack;
    DatasetSpec dataset;
    ModelShape model = ModelShape::logistic(54);
    long eval_every = 50;
    OptimizerKind optimizer = OptimizerKind::Nesterov;
    double rho = 0.01;        // logistic l2 coefficient
    long train_probe = 10000; // train-loss probe subset size (0 = full split)
    int threads = 0;          // worker/eval parallelism, 0 = auto

    // Byzantine seats assumed by the server (what Krum's f is set to).
    int assumed_byz() const {
        return static_cast<int>(std::llround(byz_ratio * n_workers));
    }
    // Seats actually uploading crafted gradients; a NoAttack run keeps
    // every worker honest.
    int byz_count() const {
        return attack.kind == AttackKind::Kind::NoAttack ? 0 : assumed_byz();
    }
    int honest_count() const { return n_workers - byz_count(); }

    void validate() const; // throws std::invalid_argument
    bool operator==(const RunConfig&) const = default;
};

struct RoundReport {
    long k = 0;
    double train_loss = 0.0;
    double test_loss = 0.0;
    double test_acc = 0.0;
    double grad_norm = 0.0; // honest-mean gradient norm this round
    double agg_norm = 0.0;  // aggregated gradient norm this round
};

struct RunSummary {
    double final_acc = 0.0;
    double best_acc = 0.0;
    double final_loss = 0.0;
    double wall_time_sec = 0.0;
    RunConfig config_echo;
    std::string error; // empty on success
};

struct RunResult {
    RunSummary summary;
    std::vector<RoundReport> reports;
    ModelParams final_params;
};

// Raised when a run dies mid-flight (non-finite loss and friends).
struct EngineError : std::runtime_error {
    long round;
    EngineError(long round, const std::string& what)
        : std::runtime_error(what + " (round " + std::to_string(round) + ")"),
          round(round) {}
};

struct DataBundle {
    Dataset train;
    Dataset test;
};

// Loads (and caches, keyed by content spec + seed) the train/test pair
// described by `spec`. Bundles are immutable once built.
std::shared_ptr<const DataBundle> load_bundle(const DatasetSpec& spec,
                                              std::uint64_t data_seed);

std::pair<double, double> evaluate(const ModelParams& p, const Dataset& test,
                                   double rho, int threads = 0);

RunResult run_training(const RunConfig& cfg);

// Runs each config; scheduling across `jobs` threads never changes any
// per-config output. `on_done` (optional) fires once per finished config
// from the thread that ran it. Per-config failures land in
// summary.error; the rest of the matrix still runs.
std::vector<RunSummary>
run_matrix(const std::vector<RunConfig>& cfgs, int jobs,
           const std::function<void(std::size_t, const RunResult&)>& on_done = {});

} // namespace byrd

#endif
