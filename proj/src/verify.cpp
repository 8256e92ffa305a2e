#include "byrd/verify.hpp"

#include "byrd/aggregate.hpp"
#include "byrd/attack.hpp"
#include "byrd/engine.hpp"
#include "byrd/model.hpp"
#include "byrd/optimizer.hpp"
#include "byrd/resilience.hpp"
#include "byrd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace byrd {

namespace {

constexpr std::uint64_t kVerifySeed = 20250811;

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b);
    return buf;
}

double vec_rel_err(const std::vector<double>& a, const std::vector<double>& b) {
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        ref += a[i] * a[i];
    }
    return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-12);
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

GradVector random_vec(RngStream& rng, std::size_t d, double scale = 1.0) {
    GradVector v(d);
    for (double& x : v) x = scale * rng.next_normal();
    return v;
}

// ---- gradients ----------------------------------------------------------

double logistic_fd_worst(RngStream& rng, int points) {
    const int d = 20, batch = 4;
    const double h = 1e-5;
    double worst = 0.0;
    for (int pt = 0; pt < points; ++pt) {
        ModelParams p;
        p.shape = ModelShape::logistic(d);
        p.values = random_vec(rng, d);
        std::vector<Sample> store(batch);
        Batch b;
        for (Sample& s : store) {
            s.features = random_vec(rng, d);
            s.label = rng.next_double() < 0.5 ? -1 : 1;
            b.samples.push_back(&s);
        }
        const double rho = pt % 3 == 0 ? 0.0 : 0.01 * (pt % 3);
        const GradVector ga = logistic_grad(p, b, rho);
        GradVector gfd(d);
        for (int i = 0; i < d; ++i) {
            const double save = p.values[i];
            p.values[i] = save + h;
            const double up = logistic_loss(p, b, rho);
            p.values[i] = save - h;
            const double dn = logistic_loss(p, b, rho);
            p.values[i] = save;
            gfd[i] = (up - dn) / (2.0 * h);
        }
        worst = std::max(worst, vec_rel_err(ga, gfd));
    }
    return worst;
}

double mlp_fd_worst(RngStream& rng, int points, int coords_per_point) {
    const ModelShape shape = ModelShape::mlp(784, 32, 10);
    const int batch = 5;
    const double h = 1e-5;
    double worst = 0.0;
    for (int pt = 0; pt < points; ++pt) {
        ModelParams p = init_params(shape, rng.next_u64());
        // Nudge the biases off zero so they participate in the check.
        for (std::size_t i = 0; i < p.values.size(); ++i)
            if (rng.next_double() < 0.01) p.values[i] += 0.1 * rng.next_normal();
        std::vector<Sample> store(batch);
        Batch b;
        for (Sample& s : store) {
            s.features.resize(shape.in);
            for (double& f : s.features) f = rng.next_double();
            s.label = static_cast<int>(rng.uniform_index(10));
            b.samples.push_back(&s);
        }
        const GradVector ga = mlp_loss_grad(p, b).second;
        std::vector<double> sub_a(coords_per_point), sub_fd(coords_per_point);
        for (int c = 0; c < coords_per_point; ++c) {
            const std::size_t i = rng.uniform_index(p.values.size());
            const double save = p.values[i];
            p.values[i] = save + h;
            const double up = mlp_loss_grad(p, b).first;
            p.values[i] = save - h;
            const double dn = mlp_loss_grad(p, b).first;
            p.values[i] = save;
            sub_a[c] = ga[i];
            sub_fd[c] = (up - dn) / (2.0 * h);
        }
        worst = std::max(worst, vec_rel_err(sub_a, sub_fd));
    }
    return worst;
}

SuiteResult gradients_suite() {
    SuiteResult out;
    out.suite = "gradients";
    RngStream rng(kVerifySeed);
    const double log_err = logistic_fd_worst(rng, 100);
    out.checks.push_back({"logistic-grad-vs-central-diff", log_err <= 1e-5,
                          fmt("max rel err %.3e (limit 1e-5, 100 points)", log_err)});
    const double mlp_err = mlp_fd_worst(rng, 100, 50);
    out.checks.push_back({"mlp-grad-vs-central-diff", mlp_err <= 1e-4,
                          fmt("max rel err %.3e (limit 1e-4, 100 points)", mlp_err)});
    return out;
}

// ---- nesterov -----------------------------------------------------------

std::vector<double> quad_grad(const std::vector<double>& diag,
                              const std::vector<double>& x) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = diag[i] * x[i];
    return g;
}

SuiteResult nesterov_suite() {
    SuiteResult out;
    out.suite = "nesterov";
    const int d = 10;
    std::vector<double> diag(d);
    for (int i = 0; i < d; ++i) diag[i] = 0.1 + 0.09 * i; // spectrum in [0.1, 0.91]

    // Two-form equivalence over 100 steps.
    {
        const double eta = 0.1, beta = 0.9;
        ModelParams x0;
        x0.shape = ModelShape::logistic(d);
        x0.values.assign(d, 1.0);
        ServerState s = make_server_state(x0, eta, beta);
        std::vector<double> xc(d, 1.0), y_prev(d, 1.0); // y_{-1} := x0
        double dev = 0.0;
        for (int k = 0; k < 100; ++k) {
            nesterov_step(s, quad_grad(diag, s.x.values));
            auto [x_next, y] = classical_nesterov_step(y_prev, xc, quad_grad(diag, xc),
                                                       eta, beta);
            xc = std::move(x_next);
            y_prev = std::move(y);
            dev = std::max(dev, linf(s.x.values, xc));
        }
        out.checks.push_back({"two-form-equivalence", dev <= 1e-10,
                              fmt("max iterate deviation %.3e (limit 1e-10)", dev)});
    }

    // Unrolled-momentum identity over 50 deterministic steps.
    {
        const double eta = 0.05, beta = 0.6;
        ModelParams x0;
        x0.shape = ModelShape::logistic(d);
        x0.values.assign(d, 1.0);
        ServerState s = make_server_state(x0, eta, beta);
        std::vector<std::pair<std::vector<double>, std::vector<double>>> hist;
        for (int k = 0; k < 50; ++k) {
            const auto g = quad_grad(diag, s.x.values);
            hist.push_back({s.x.values, g});
            nesterov_step(s, g);
        }
        hist.push_back({s.x.values, quad_grad(diag, s.x.values)});
        const double res = unroll_identity_residual(hist, eta, beta);
        out.checks.push_back({"unroll-identity", res <= 1e-8,
                              fmt("max residual %.3e (limit 1e-8)", res)});

        // First-step special case: (x0 - x1)/eta = (1+beta) g0.
        double first = 0.0;
        for (int i = 0; i < d; ++i) {
            const double lhs = (hist[0].first[i] - hist[1].first[i]) / eta;
            first = std::max(first, std::fabs(lhs - (1.0 + beta) * hist[0].second[i]));
        }
        out.checks.push_back({"first-step-unroll", first <= 1e-12,
                              fmt("max deviation %.3e (limit 1e-12)", first)});

        // Auxiliary-sequence telescope: v_{k+1} - v_k = -eta grad_k/(1-beta).
        double aux_dev = 0.0;
        std::vector<double> v_prev = hist[0].first; // v_0 = x_0
        for (std::size_t k = 1; k < hist.size(); ++k) {
            const auto v = aux_sequence_v(hist[k].first, hist[k - 1].first,
                                          hist[k - 1].second, eta, beta);
            for (int i = 0; i < d; ++i) {
                const double expect = -eta * hist[k - 1].second[i] / (1.0 - beta);
                aux_dev = std::max(aux_dev, std::fabs(v[i] - v_prev[i] - expect));
            }
            v_prev = v;
        }
        out.checks.push_back({"aux-sequence-telescope", aux_dev <= 1e-10,
                              fmt("max deviation %.3e (limit 1e-10)", aux_dev)});
    }

    // beta = 0 reduces to plain gradient descent, bit for bit.
    {
        const double eta = 0.2;
        ModelParams x0;
        x0.shape = ModelShape::logistic(d);
        x0.values.assign(d, 1.0);
        ServerState s = make_server_state(x0, eta, 0.0);
        std::vector<double> xs(d, 1.0);
        bool identical = true;
        for (int k = 0; k < 20; ++k) {
            const auto g = quad_grad(diag, s.x.values);
            nesterov_step(s, g);
            const auto gs = quad_grad(diag, xs);
            for (int i = 0; i < d; ++i) xs[i] -= eta * gs[i];
            for (int i = 0; i < d; ++i)
                if (xs[i] != s.x.values[i]) identical = false;
        }
        out.checks.push_back({"beta0-is-sgd", identical,
                              identical ? "bitwise identical over 20 steps"
                                        : "sequences diverged"});
    }

    // Gradient-norm decay under the theorem's stepsize on a quadratic.
    {
        std::vector<double> spec2(d);
        for (int i = 0; i < d; ++i) spec2[i] = 1.2 + 0.8 * i / (d - 1); // L = 2
        bool all_ok = true;
        std::string detail;
        for (double beta : {0.0, 0.5, 0.9}) {
            TheoremParams tp;
            tp.sin_gamma = 0.0;
            tp.c1 = 1.0;
            tp.c2 = 0.0;
            tp.L = 2.0;
            tp.beta = beta;
            const double eta = 0.5 * max_stepsize(tp);
            ModelParams x0;
            x0.shape = ModelShape::logistic(d);
            x0.values.assign(d, 1.0);
            ServerState s = make_server_state(x0, eta, beta);
            double gn = 0.0;
            for (int k = 0; k < 10000; ++k) {
                const auto g = quad_grad(spec2, s.x.values);
                gn = 0.0;
                for (double v : g) gn += v * v;
                gn = std::sqrt(gn);
                if (gn < 1e-6) break;
                nesterov_step(s, g);
            }
            if (gn >= 1e-6) all_ok = false;
            detail += fmt("beta=%.1f |grad|=%.2e ", beta, gn);
        }
        out.checks.push_back({"quadratic-descent", all_ok, detail + "(limit 1e-6)"});
    }
    return out;
}

// ---- aggregation --------------------------------------------------------

SuiteResult aggregation_suite() {
    SuiteResult out;
    out.suite = "aggregation";
    RngStream rng(kVerifySeed + 1);

    // CwMed against a full-sort oracle on 1000 random instances.
    {
        double worst = 0.0;
        for (int inst = 0; inst < 1000; ++inst) {
            const std::size_t n = 1 + rng.uniform_index(12);
            const std::size_t d = 1 + rng.uniform_index(8);
            std::vector<GradVector> grads(n);
            for (auto& g : grads) g = random_vec(rng, d, 3.0);
            const GradVector got = agg_cwmed(grads);
            for (std::size_t i = 0; i < d; ++i) {
                std::vector<double> col(n);
                for (std::size_t j = 0; j < n; ++j) col[j] = grads[j][i];
                std::sort(col.begin(), col.end());
                const double want = n % 2 == 1 ? col[n / 2]
                                               : 0.5 * (col[n / 2 - 1] + col[n / 2]);
                worst = std::max(worst, std::fabs(got[i] - want));
            }
        }
        out.checks.push_back({"cwmed-vs-sort-oracle", worst == 0.0,
                              fmt("max abs deviation %.3e over 1000 instances", worst)});
    }

    // GeoMed objective against a dense grid, plus per-iteration monotonicity.
    {
        auto objective = [](const GradVector& m, const std::vector<GradVector>& g) {
            double s = 0.0;
            for (const auto& v : g) {
                double q = 0.0;
                for (std::size_t i = 0; i < m.size(); ++i)
                    q += (m[i] - v[i]) * (m[i] - v[i]);
                s += std::sqrt(q);
            }
            return s;
        };
        const std::vector<GradVector> fix2d = {{0, 0}, {2, 0}, {1, 1}, {1, -1}};
        std::vector<double> trace;
        const GradVector got = agg_geomed(fix2d, 1e-9, 200, &trace);
        double grid_best = 1e300;
        for (int ix = -500; ix <= 2500; ++ix)
            for (int iy = -1200; iy <= 1200; ++iy)
                grid_best = std::min(
                    grid_best, objective({ix * 1e-3, iy * 1e-3}, fix2d));
        const double gap = objective(got, fix2d) - grid_best;
        const double dist = std::hypot(got[0] - 1.0, got[1]);
        out.checks.push_back({"geomed-2d-grid-optimum", gap <= 1e-4 && dist <= 1e-4,
                              fmt("objective gap %.3e, dist to (1,0) %.3e", gap, dist)});

        const std::vector<GradVector> fix1d = {{0.0}, {1.0}, {10.0}};
        const GradVector got1 = agg_geomed(fix1d, 1e-9, 200);
        out.checks.push_back({"geomed-1d-median", std::fabs(got1[0] - 1.0) <= 1e-4,
                              fmt("returned %.8f (want 1.0)", got1[0])});

        double worst_uptick = 0.0;
        for (int inst = 0; inst < 20; ++inst) {
            const std::size_t n = 3 + rng.uniform_index(8);
            const std::size_t d = 1 + rng.uniform_index(5);
            std::vector<GradVector> grads(n);
            for (auto& g : grads) g = random_vec(rng, d, 2.0);
            std::vector<double> tr;
            agg_geomed(grads, 1e-10, 100, &tr);
            for (std::size_t t = 1; t < tr.size(); ++t)
                worst_uptick =
                    std::max(worst_uptick, (tr[t] - tr[t - 1]) / (1.0 + tr[t - 1]));
        }
        out.checks.push_back({"geomed-monotone-objective", worst_uptick <= 1e-12,
                              fmt("worst relative uptick %.3e (limit 1e-12)",
                                  worst_uptick)});
    }

    // Krum against exhaustive scoring for every N <= 8, f <= 2.
    {
        bool all_match = true;
        int instances = 0;
        for (int n = 3; n <= 8; ++n)
            for (int f = 0; f <= 2 && n >= f + 3; ++f)
                for (int inst = 0; inst < 30; ++inst) {
                    const std::size_t d = 1 + rng.uniform_index(5);
                    std::vector<GradVector> grads(n);
                    for (auto& g : grads) g = random_vec(rng, d, 2.0);
                    // Oracle: full sort of each candidate's distances.
                    std::size_t want = 0;
                    double want_score = 1e300;
                    for (int i = 0; i < n; ++i) {
                        std::vector<double> dists;
                        for (int j = 0; j < n; ++j) {
                            if (j == i) continue;
                            double s = 0.0;
                            for (std::size_t c = 0; c < d; ++c)
                                s += (grads[i][c] - grads[j][c]) *
                                     (grads[i][c] - grads[j][c]);
                            dists.push_back(s);
                        }
                        std::sort(dists.begin(), dists.end());
                        double score = 0.0;
                        for (int j = 0; j < n - f - 2; ++j) score += dists[j];
                        if (score < want_score) {
                            want_score = score;
                            want = i;
                        }
                    }
                    ++instances;
                    if (krum_select_index(grads, f) != want) all_match = false;
                }
        out.checks.push_back({"krum-vs-bruteforce", all_match,
                              fmt("%g instances, N<=8, f<=2", instances)});
    }

    // Idempotence, permutation invariance, majority breakdown.
    {
        const GradVector v = random_vec(rng, 6, 2.0);
        bool ok = true;
        for (int n : {1, 4, 7}) {
            std::vector<GradVector> same(n, v);
            // summing n copies costs at most a few ulps before the divide
            if (linf(agg_mean(same), v) > 1e-14) ok = false;
            if (linf(agg_cwmed(same), v) != 0.0) ok = false;
            if (n >= 3 && linf(agg_krum(same, 0), v) != 0.0) ok = false;
            if (linf(agg_geomed(same, 1e-8, 100), v) > 1e-8) ok = false;
        }
        out.checks.push_back({"idempotence-on-consensus", ok, "n in {1,4,7}"});

        std::vector<GradVector> grads(8);
        for (auto& g : grads) g = random_vec(rng, 6, 2.0);
        std::vector<GradVector> shuffled = grads;
        rng.shuffle(shuffled);
        double dev = std::max(linf(agg_mean(grads), agg_mean(shuffled)),
                              linf(agg_cwmed(grads), agg_cwmed(shuffled)));
        dev = std::max(dev, linf(agg_geomed(grads, 1e-10, 200),
                                 agg_geomed(shuffled, 1e-10, 200)));
        const bool krum_same =
            linf(agg_krum(grads, 2), agg_krum(shuffled, 2)) == 0.0;
        out.checks.push_back({"permutation-invariance", dev <= 1e-12 && krum_same,
                              fmt("max deviation %.3e (limit 1e-12)", dev)});

        std::vector<GradVector> maj(7, v);
        for (int i = 0; i < 3; ++i) maj[4 + i] = random_vec(rng, 6, 5.0);
        out.checks.push_back({"cwmed-majority-breakdown",
                              linf(agg_cwmed(maj), v) == 0.0,
                              "4-of-7 majority recovered exactly"});
    }

    // Gram-matrix distance path agrees with direct scoring at scale.
    {
        bool ok = true;
        for (int inst = 0; inst < 5; ++inst) {
            const std::size_t d = 6000, n = 40;
            std::vector<GradVector> grads(n);
            for (auto& g : grads) g = random_vec(rng, d);
            std::size_t want = 0;
            double want_score = 1e300;
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> dists;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    double s = 0.0;
                    for (std::size_t c = 0; c < d; ++c)
                        s += (grads[i][c] - grads[j][c]) * (grads[i][c] - grads[j][c]);
                    dists.push_back(s);
                }
                std::sort(dists.begin(), dists.end());
                double score = 0.0;
                for (std::size_t j = 0; j < n - 8 - 2; ++j) score += dists[j];
                if (score < want_score) {
                    want_score = score;
                    want = i;
                }
            }
            if (krum_select_index(grads, 8) != want) ok = false;
        }
        out.checks.push_back({"krum-gram-path-agrees", ok, "N=40, d=6000, f=8"});
    }
    return out;
}

// ---- attacks ------------------------------------------------------------

SuiteResult attacks_suite() {
    SuiteResult out;
    out.suite = "attacks";
    RngStream rng(kVerifySeed + 2);

    // Zero-gradient + Mean freezes the model through the whole engine.
    {
        RunConfig cfg;
        cfg.n_workers = 10;
        cfg.byz_ratio = 0.2;
        cfg.eta = 0.05;
        cfg.beta = 0.9;
        cfg.batch_size = 8;
        cfg.seed = 99;
        cfg.rule.kind = AggregationRule::Kind::Mean;
        cfg.attack.kind = AttackKind::Kind::ZeroGradient;
        cfg.dataset.kind = DatasetSpec::Kind::SynthBinary;
        cfg.dataset.synth_n = 400;
        cfg.dataset.synth_dim = 10;
        cfg.model = ModelShape::logistic(10);
        cfg.eval_every = 50;
        cfg.rho = 0.01;
        double worst = 0.0;
        for (long K : {37L, 200L}) {
            cfg.iterations = K;
            const RunResult res = run_training(cfg);
            const ModelParams x0 =
                init_params(cfg.model, (cfg.seed ^ kDataStreamTag) + 3);
            double drift = 0.0;
            for (std::size_t i = 0; i < x0.values.size(); ++i)
                drift = std::max(drift,
                                 std::fabs(res.final_params.values[i] - x0.values[i]));
            worst = std::max(worst, drift);
        }
        out.checks.push_back({"zero-gradient-freezes-mean", worst <= 1e-10,
                              fmt("max |x_K - x_0| %.3e over K in {37,200}", worst)});
    }

    // Sign-flip uploads are exactly mu * honest_mean.
    {
        std::vector<GradVector> honest(7);
        for (auto& g : honest) g = random_vec(rng, 12, 2.0);
        const GradVector m = honest_mean(honest);
        const auto crafted = craft_sign_flip(honest, -10.0, 5);
        bool exact = crafted.size() == 5;
        for (const auto& g : crafted)
            for (std::size_t i = 0; i < g.size(); ++i)
                if (g[i] != -10.0 * m[i]) exact = false;
        out.checks.push_back({"sign-flip-exact", exact,
                              exact ? "all uploads equal mu*honest_mean bitwise"
                                    : "mismatch"});
    }

    // Random-noise per-coordinate sample variance within 5% of mu.
    {
        const int d = 54, draws = 10000;
        const double mu = 300.0;
        std::vector<GradVector> honest(3, GradVector(d, 1.0));
        const auto crafted = craft_random_noise(honest, mu, draws, rng);
        double lo = 1e300, hi = 0.0;
        for (int c = 0; c < d; ++c) {
            double mean = 0.0;
            for (const auto& g : crafted) mean += g[c];
            mean /= draws;
            double var = 0.0;
            for (const auto& g : crafted) var += (g[c] - mean) * (g[c] - mean);
            var /= draws - 1;
            lo = std::min(lo, var);
            hi = std::max(hi, var);
        }
        const bool ok = lo >= 285.0 && hi <= 315.0;
        out.checks.push_back({"random-noise-variance", ok,
                              fmt("per-coord var in [%.1f, %.1f] (want [285,315])",
                                  lo, hi)});
    }

    // Cancellation identity of the zero-gradient craft.
    {
        std::vector<GradVector> honest(80);
        for (auto& g : honest) g = random_vec(rng, 30, 3.0);
        RngStream tmp(1);
        const auto uploads =
            apply_attack({AttackKind::Kind::ZeroGradient, 0.0}, honest, 20, tmp);
        const GradVector m = agg_mean(uploads);
        double norm = 0.0;
        for (double v : m) norm += v * v;
        norm = std::sqrt(norm);
        out.checks.push_back({"zero-gradient-cancellation", norm <= 1e-10,
                              fmt("|mean of 100 uploads| = %.3e (limit 1e-10)", norm)});
    }
    return out;
}

// ---- resilience ---------------------------------------------------------

SuiteResult resilience_suite() {
    SuiteResult out;
    out.suite = "resilience";
    RngStream rng(kVerifySeed + 3);

    {
        ScenarioSpec sc;
        sc.base_grad = random_vec(rng, 10);
        sc.scales = {0.5, 1.0, 2.0};
        sc.noise_std = 0.0;
        sc.n_honest = 5;
        sc.n_byz = 0;
        AggregationRule mean;
        const auto est = estimate_resilience(mean, sc, 50, rng);
        out.checks.push_back({"mean-noiseless-unbiased",
                              est.sin_gamma_hat <= 1e-9,
                              fmt("sin_gamma_hat %.3e (limit 1e-9)", est.sin_gamma_hat)});
    }
    {
        ScenarioSpec sc;
        sc.base_grad = random_vec(rng, 10);
        sc.noise_std = 0.0;
        sc.n_honest = 8;
        sc.n_byz = 2;
        sc.attack.kind = AttackKind::Kind::ZeroGradient;
        AggregationRule mean;
        const auto est = estimate_resilience(mean, sc, 50, rng);
        out.checks.push_back({"mean-zero-gradient-violated",
                              std::fabs(est.sin_gamma_hat - 1.0) <= 1e-9,
                              fmt("sin_gamma_hat %.12f (want 1)", est.sin_gamma_hat)});
    }
    {
        ScenarioSpec sc;
        sc.base_grad = GradVector(10, 1.0);
        sc.noise_std = 0.5;
        sc.n_honest = 8;
        sc.n_byz = 2; // eps = 0.2 of N = 10
        sc.attack.kind = AttackKind::Kind::SignFlip;
        sc.attack.mu = -10.0;
        AggregationRule krum;
        krum.kind = AggregationRule::Kind::Krum;
        krum.krum_f = 2;
        const auto est = estimate_resilience(krum, sc, 1000, rng);
        out.checks.push_back({"krum-sign-flip-descent",
                              est.sin_gamma_hat < 0.5,
                              fmt("sin_gamma_hat %.4f (limit 0.5, 1000 trials)",
                                  est.sin_gamma_hat)});
        out.checks.push_back({"second-moment-envelope",
                              est.c1_hat >= 0.0 && est.c2_hat >= 0.0,
                              fmt("c1_hat %.3f c2_hat %.3f", est.c1_hat, est.c2_hat)});
    }
    return out;
}

// ---- theorem ------------------------------------------------------------

SuiteResult theorem_suite() {
    SuiteResult out;
    out.suite = "theorem";

    TheoremParams tp;
    tp.sin_gamma = 0.0;
    tp.beta = 0.0;
    tp.c1 = 1.0;
    tp.L = 1.0;
    const bool sub1 = max_stepsize(tp) == 1.0;
    tp.sin_gamma = 0.5;
    tp.c1 = 2.0;
    const bool sub2 = max_stepsize(tp) == 0.25;
    out.checks.push_back({"max-stepsize-substitutions", sub1 && sub2,
                          "(0,0,1,1)->1.0, (0.5,0,2,1)->0.25"});

    TheoremParams fl;
    fl.eta = 0.1;
    fl.L = 1.0;
    fl.c2 = 0.0;
    fl.beta = 0.0;
    fl.sin_gamma = 0.0;
    const bool f0 = error_floor_bound(fl) == 0.0;
    fl.c2 = 1.0;
    const bool f1 = error_floor_bound(fl) == 0.2;
    TheoremParams fl2 = fl;
    fl2.eta = 0.2;
    const bool f2 = error_floor_bound(fl2) == 2.0 * error_floor_bound(fl);
    out.checks.push_back({"error-floor-substitutions", f0 && f1 && f2,
                          "c2=0 -> 0; (0.1,1,1,0,0) -> 0.2; linear in eta"});

    TheoremParams deg;
    deg.sin_gamma = 1.0;
    deg.c1 = 1.0;
    deg.L = 1.0;
    out.checks.push_back({"degenerate-sin-gamma", max_stepsize(deg) == 0.0,
                          "sin_gamma = 1 -> stepsize 0"});

    bool monotone = true;
    for (int bi = 0; bi < 20; ++bi) {
        TheoremParams g;
        g.beta = 0.95 * bi / 19.0;
        g.c1 = 1.5;
        g.c2 = 0.7;
        g.L = 2.0;
        g.eta = 0.01;
        double prev_step = 1e300, prev_floor = -1.0;
        for (int si = 0; si < 20; ++si) {
            g.sin_gamma = 0.95 * si / 19.0;
            const double step = max_stepsize(g);
            const double floor = error_floor_bound(g);
            if (step > prev_step || floor < prev_floor) monotone = false;
            prev_step = step;
            prev_floor = floor;
        }
    }
    out.checks.push_back({"monotone-in-sin-gamma", monotone,
                          "20x20 grid: stepsize non-increasing, floor non-decreasing"});
    return out;
}

} // namespace

SuiteResult verify_gradients() { return gradients_suite(); }
SuiteResult verify_nesterov() { return nesterov_suite(); }
SuiteResult verify_aggregation() { return aggregation_suite(); }
SuiteResult verify_attacks() { return attacks_suite(); }
SuiteResult verify_resilience() { return resilience_suite(); }
SuiteResult verify_theorem() { return theorem_suite(); }

std::vector<SuiteResult> run_verify(const std::string& which) {
    std::vector<SuiteResult> out;
    const bool all = which == "all" || which.empty();
    bool known = all;
    if (all || which == "gradients") out.push_back(verify_gradients()), known = true;
    if (all || which == "nesterov") out.push_back(verify_nesterov()), known = true;
    if (all || which == "aggregation") out.push_back(verify_aggregation()), known = true;
    if (all || which == "attacks") out.push_back(verify_attacks()), known = true;
    if (all || which == "resilience") out.push_back(verify_resilience()), known = true;
    if (all || which == "theorem") out.push_back(verify_theorem()), known = true;
    if (!known)
        throw std::invalid_argument(
            "unknown suite '" + which +
            "' (all|gradients|nesterov|aggregation|attacks|resilience|theorem)");
    return out;
}

} // namespace byrd
