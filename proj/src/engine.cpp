#include "byrd/engine.hpp"

#include "byrd/optimizer.hpp"
#include "byrd/rng.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace byrd {

namespace {

const char* dataset_kind_name(DatasetSpec::Kind k) {
    switch (k) {
    case DatasetSpec::Kind::Covtype:
        return "covtype";
    case DatasetSpec::Kind::Mnist:
        return "mnist";
    case DatasetSpec::Kind::SynthBinary:
        return "synth_binary";
    case DatasetSpec::Kind::SynthClass10:
        return "synth_class10";
    }
    return "?";
}

// Min-max scale the 10 leading numeric COVTYPE columns to [0,1]; the
// remaining 44 columns are already binary indicators.
void minmax_scale_covtype(Dataset& ds) {
    const int cols = std::min(ds.feature_dim, 10);
    for (int c = 0; c < cols; ++c) {
        double lo = ds.samples[0].features[c], hi = lo;
        for (const Sample& s : ds.samples) {
            lo = std::min(lo, s.features[c]);
            hi = std::max(hi, s.features[c]);
        }
        if (hi <= lo) continue;
        const double inv = 1.0 / (hi - lo);
        for (Sample& s : ds.samples) s.features[c] = (s.features[c] - lo) * inv;
    }
}

void apply_train_limit(Dataset& train, long limit) {
    if (limit > 0 && static_cast<std::size_t>(limit) < train.samples.size())
        train.samples.resize(limit);
}

double l2_norm(const GradVector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace

std::string DatasetSpec::cache_key() const {
    std::ostringstream os;
    os << dataset_kind_name(kind) << '|' << path << '|' << train_images << '|'
       << train_labels << '|' << test_images << '|' << test_labels << '|'
       << split_fraction << '|' << minmax_scale << '|' << synth_n << '|' << synth_dim
       << '|' << limit_train;
    return os.str();
}

void RunConfig::validate() const {
    if (n_workers < 1) throw std::invalid_argument("n_workers must be >= 1");
    if (byz_ratio < 0.0 || byz_ratio >= 0.5)
        throw std::invalid_argument("byz_ratio must be in [0, 0.5): honest workers "
                                    "must satisfy H > N/2");
    const int h_assumed = n_workers - assumed_byz();
    if (2 * h_assumed <= n_workers)
        throw std::invalid_argument("honest workers must satisfy H > N/2");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (eta <= 0.0) throw std::invalid_argument("eta must be > 0");
    if (beta < 0.0 || beta >= 1.0) throw std::invalid_argument("beta must be in [0,1)");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
    if (rho < 0.0) throw std::invalid_argument("rho must be >= 0");
    if (attack.kind == AttackKind::Kind::RandomNoise && attack.mu < 0.0)
        throw std::invalid_argument("random-noise mu must be >= 0");
    if (rule.kind == AggregationRule::Kind::Krum &&
        n_workers < rule.krum_f + 3)
        throw std::invalid_argument("krum needs N >= f + 3");
    if (rule.kind == AggregationRule::Kind::GeoMed && rule.geomed_tol <= 0.0)
        throw std::invalid_argument("geomed tol must be > 0");
}

std::shared_ptr<const DataBundle> load_bundle(const DatasetSpec& spec,
                                              std::uint64_t data_seed) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const DataBundle>> cache;

    std::ostringstream key_os;
    key_os << spec.cache_key() << '|' << data_seed;
    const std::string key = key_os.str();

    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    auto bundle = std::make_shared<DataBundle>();
    switch (spec.kind) {
    case DatasetSpec::Kind::Covtype: {
        Dataset full = load_covtype(spec.path);
        if (spec.minmax_scale) minmax_scale_covtype(full);
        SplitSpec split{spec.split_fraction, data_seed + 1};
        auto [train, test] = stratified_split(full, split);
        bundle->train = std::move(train);
        bundle->test = std::move(test);
        break;
    }
    case DatasetSpec::Kind::Mnist: {
        bundle->train = load_mnist(spec.train_images, spec.train_labels);
        bundle->test = load_mnist(spec.test_images, spec.test_labels);
        break;
    }
    case DatasetSpec::Kind::SynthBinary:
    case DatasetSpec::Kind::SynthClass10: {
        Dataset full = synth_dataset(spec.kind == DatasetSpec::Kind::SynthBinary
                                         ? SyntheticKind::Binary
                                         : SyntheticKind::Class10,
                                     spec.synth_n, spec.synth_dim, data_seed);
        SplitSpec split{spec.split_fraction, data_seed + 1};
        auto [train, test] = stratified_split(full, split);
        bundle->train = std::move(train);
        bundle->test = std::move(test);
        break;
    }
    }
    apply_train_limit(bundle->train, spec.limit_train);
    cache[key] = bundle;
    return bundle;
}

std::pair<double, double> evaluate(const ModelParams& p, const Dataset& test,
                                   double rho, int threads) {
    return dataset_loss_acc(p, test, rho, threads);
}

RunResult run_training(const RunConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    const std::uint64_t data_seed = cfg.seed ^ kDataStreamTag;
    const auto bundle = load_bundle(cfg.dataset, data_seed);
    const Dataset& train = bundle->train;
    const Dataset& test = bundle->test;

    const bool is_mlp = cfg.model.kind == ModelShape::Kind::Mlp;
    if (train.feature_dim != (is_mlp ? cfg.model.in : cfg.model.features))
        throw std::invalid_argument("model input dimension does not match dataset");
    if (train.label_kind != cfg.model.label_kind())
        throw std::invalid_argument("model label kind does not match dataset");

    const int n_honest = cfg.honest_count();
    const int n_byz = cfg.byz_count();
    const std::vector<WorkerShard> shards =
        partition_uniform(train, n_honest, data_seed + 2);

    std::vector<RngStream> worker_rng;
    worker_rng.reserve(n_honest);
    for (int n = 1; n <= n_honest; ++n)
        worker_rng.emplace_back(cfg.seed ^ static_cast<std::uint64_t>(n));
    RngStream attack_rng(cfg.seed ^ kAttackStreamTag);

    ModelParams x0 = init_params(cfg.model, data_seed + 3);
    const double step_beta = cfg.optimizer == OptimizerKind::Sgd ? 0.0 : cfg.beta;
    ServerState state = make_server_state(std::move(x0), cfg.eta, step_beta);

    // Fixed strided probe subset of the training split for the train-loss
    // metric; the full test set is always used for test metrics.
    Dataset probe_storage;
    const Dataset* probe = &train;
    if (cfg.train_probe > 0 &&
        static_cast<std::size_t>(cfg.train_probe) < train.samples.size()) {
        probe_storage.label_kind = train.label_kind;
        probe_storage.feature_dim = train.feature_dim;
        const std::size_t stride = train.samples.size() / cfg.train_probe;
        probe_storage.samples.reserve(cfg.train_probe);
        for (long i = 0; i < cfg.train_probe; ++i)
            probe_storage.samples.push_back(train.samples[i * stride]);
        probe = &probe_storage;
    }

    const int threads = resolve_threads(cfg.threads);
    const bool thread_workers =
        threads > 1 && n_honest > 1 &&
        static_cast<double>(n_honest) * cfg.batch_size * cfg.model.param_count() > 2e6;

    std::vector<GradVector> honest(n_honest);
    auto worker_range = [&](int lo, int hi) {
        for (int n = lo; n < hi; ++n) {
            const Batch b =
                sample_minibatch(train, shards[n], cfg.batch_size, worker_rng[n]);
            if (is_mlp)
                honest[n] = mlp_loss_grad(state.x, b).second;
            else
                honest[n] = logistic_grad(state.x, b, cfg.rho);
        }
    };

    RunResult result;
    result.summary.config_echo = cfg;
    double best_acc = 0.0;
    bool have_eval = false;

    for (long k = 0; k < cfg.iterations; ++k) {
        if (thread_workers) {
            const int nt = std::min(threads, n_honest);
            std::vector<std::thread> pool;
            pool.reserve(nt);
            for (int t = 0; t < nt; ++t) {
                const int lo = static_cast<int>(static_cast<long>(n_honest) * t / nt);
                const int hi =
                    static_cast<int>(static_cast<long>(n_honest) * (t + 1) / nt);
                pool.emplace_back(worker_range, lo, hi);
            }
            for (auto& th : pool) th.join();
        } else {
            worker_range(0, n_honest);
        }

        std::vector<GradVector> uploads_storage;
        const std::vector<GradVector>* uploads = &honest;
        if (n_byz > 0) {
            uploads_storage = apply_attack(cfg.attack, honest, n_byz, attack_rng);
            uploads = &uploads_storage;
        }
        const GradVector agg = aggregate(cfg.rule, *uploads);

        if (k % cfg.eval_every == 0 || k == cfg.iterations - 1) {
            RoundReport r;
            r.k = k;
            auto [train_loss, train_acc] =
                dataset_loss_acc(state.x, *probe, cfg.rho, threads);
            (void)train_acc;
            auto [test_loss, test_acc] = evaluate(state.x, test, cfg.rho, threads);
            r.train_loss = train_loss;
            r.test_loss = test_loss;
            r.test_acc = test_acc;
            r.grad_norm = l2_norm(honest_mean(honest));
            r.agg_norm = l2_norm(agg);
            if (!std::isfinite(r.train_loss) || !std::isfinite(r.test_loss))
                throw EngineError(k, "non-finite loss");
            best_acc = std::max(best_acc, r.test_acc);
            result.reports.push_back(r);
            have_eval = true;
        }

        try {
            nesterov_step(state, agg);
        } catch (const std::runtime_error& e) {
            throw EngineError(k, e.what());
        }
    }

    if (!have_eval) throw EngineError(cfg.iterations, "no evaluation rounds");
    const RoundReport& last = result.reports.back();
    result.summary.final_acc = last.test_acc;
    result.summary.final_loss = last.test_loss;
    result.summary.best_acc = best_acc;
    result.summary.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.final_params = std::move(state.x);
    return result;
}

std::vector<RunSummary>
run_matrix(const std::vector<RunConfig>& cfgs, int jobs,
           const std::function<void(std::size_t, const RunResult&)>& on_done) {
    if (cfgs.empty()) throw std::invalid_argument("empty config list");
    std::vector<RunSummary> summaries(cfgs.size());

    auto run_one = [&](std::size_t i) {
        try {
            RunResult res = run_training(cfgs[i]);
            summaries[i] = res.summary;
            if (on_done) on_done(i, res);
        } catch (const std::exception& e) {
            summaries[i].config_echo = cfgs[i];
            summaries[i].error = e.what();
            if (on_done) {
                RunResult failed;
                failed.summary = summaries[i];
                on_done(i, failed);
            }
        }
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < cfgs.size(); ++i) run_one(i);
        return summaries;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int nt = std::min<std::size_t>(jobs, cfgs.size());
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < cfgs.size();
                 i = next.fetch_add(1))
                run_one(i);
        });
    for (auto& th : pool) th.join();
    return summaries;
}

} // namespace byrd
