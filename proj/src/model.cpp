#include "byrd/model.hpp"

#include "byrd/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cblas.h>
#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace byrd {

namespace {

// OpenBLAS spawns its own pthreads by default; we parallelise at the
// worker/chunk level instead, and thread-count must never change results.
std::once_flag g_blas_once;
void blas_init() {
    std::call_once(g_blas_once, [] { openblas_set_num_threads(1); });
}

void dgemm(CBLAS_TRANSPOSE ta, CBLAS_TRANSPOSE tb, int m, int n, int k,
           const double* a, int lda, const double* b, int ldb, double* c, int ldc) {
    blas_init();
    cblas_dgemm(CblasRowMajor, ta, tb, m, n, k, 1.0, a, lda, b, ldb, 0.0, c, ldc);
}

// log(1 + exp(z)) without overflow for large |z|.
double softplus(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

// sigma(z) = 1 / (1 + exp(-z)), branch keeps the exp argument negative.
double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct MlpView {
    const double* W1;
    const double* b1;
    const double* W2;
    const double* b2;
    int in, hid, out;
};

MlpView mlp_view(const ModelParams& p) {
    const ModelShape& s = p.shape;
    const double* v = p.values.data();
    MlpView m;
    m.in = s.in;
    m.hid = s.hidden;
    m.out = s.out;
    m.W1 = v;
    m.b1 = v + static_cast<std::size_t>(s.hidden) * s.in;
    m.W2 = m.b1 + s.hidden;
    m.b2 = m.W2 + static_cast<std::size_t>(s.out) * s.hidden;
    return m;
}

void require_logistic(const ModelParams& p) {
    if (p.shape.kind != ModelShape::Kind::Logistic)
        throw std::invalid_argument("logistic op on non-logistic params");
    if (p.values.size() != p.shape.param_count())
        throw std::invalid_argument("param vector length does not match shape");
}

void require_mlp(const ModelParams& p) {
    if (p.shape.kind != ModelShape::Kind::Mlp)
        throw std::invalid_argument("mlp op on non-mlp params");
    if (p.values.size() != p.shape.param_count())
        throw std::invalid_argument("param vector length does not match shape");
}

void check_binary_sample(const Sample& s, int dim) {
    if (s.label != 1 && s.label != -1)
        throw std::invalid_argument("binary op on non-binary label");
    if (static_cast<int>(s.features.size()) != dim)
        throw std::invalid_argument("feature dimension mismatch");
}

void check_class_sample(const Sample& s, int dim, int classes) {
    if (s.label < 0 || s.label >= classes)
        throw std::invalid_argument("class label out of range");
    if (static_cast<int>(s.features.size()) != dim)
        throw std::invalid_argument("feature dimension mismatch");
}

// Forward pass over a packed row-major input block X (n x in). Fills
// preactivations A1 (n x hid), activations H, logits L (n x out).
void mlp_forward_block(const MlpView& m, const double* X, int n,
                       std::vector<double>& A1, std::vector<double>& H,
                       std::vector<double>& L) {
    A1.resize(static_cast<std::size_t>(n) * m.hid);
    H.resize(A1.size());
    L.resize(static_cast<std::size_t>(n) * m.out);
    dgemm(CblasNoTrans, CblasTrans, n, m.hid, m.in, X, m.in, m.W1, m.in, A1.data(), m.hid);
    for (int r = 0; r < n; ++r) {
        double* a = A1.data() + static_cast<std::size_t>(r) * m.hid;
        double* h = H.data() + static_cast<std::size_t>(r) * m.hid;
        for (int j = 0; j < m.hid; ++j) {
            a[j] += m.b1[j];
            h[j] = a[j] > 0.0 ? a[j] : 0.0;
        }
    }
    dgemm(CblasNoTrans, CblasTrans, n, m.out, m.hid, H.data(), m.hid, m.W2, m.hid, L.data(), m.out);
    for (int r = 0; r < n; ++r) {
        double* l = L.data() + static_cast<std::size_t>(r) * m.out;
        for (int j = 0; j < m.out; ++j) l[j] += m.b2[j];
    }
}

// Per-row softmax + cross-entropy in logsumexp form; logits row is
// replaced by probabilities. Returns the summed loss over rows.
double softmax_xent_rows(double* L, int n, int out, const int* labels) {
    double loss_sum = 0.0;
    for (int r = 0; r < n; ++r) {
        double* l = L + static_cast<std::size_t>(r) * out;
        double mx = l[0];
        for (int j = 1; j < out; ++j) mx = std::max(mx, l[j]);
        double s = 0.0;
        for (int j = 0; j < out; ++j) s += std::exp(l[j] - mx);
        if (labels) loss_sum += mx + std::log(s) - l[labels[r]];
        for (int j = 0; j < out; ++j) l[j] = std::exp(l[j] - mx) / s;
    }
    return loss_sum;
}

int default_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace

ModelParams init_params(const ModelShape& shape, std::uint64_t seed) {
    ModelParams p;
    p.shape = shape;
    p.values.assign(shape.param_count(), 0.0);
    if (shape.kind == ModelShape::Kind::Logistic) return p;

    RngStream rng(seed);
    double* v = p.values.data();
    const double sd1 = std::sqrt(2.0 / shape.in);
    const std::size_t n1 = static_cast<std::size_t>(shape.hidden) * shape.in;
    for (std::size_t i = 0; i < n1; ++i) v[i] = rng.normal(0.0, sd1);
    // b1 stays zero
    const double sd2 = std::sqrt(2.0 / shape.hidden);
    double* w2 = v + n1 + shape.hidden;
    const std::size_t n2 = static_cast<std::size_t>(shape.out) * shape.hidden;
    for (std::size_t i = 0; i < n2; ++i) w2[i] = rng.normal(0.0, sd2);
    // b2 stays zero
    return p;
}

double logistic_loss(const ModelParams& p, const Batch& b, double rho) {
    require_logistic(p);
    if (b.samples.empty()) throw std::invalid_argument("empty batch");
    if (rho < 0.0) throw std::invalid_argument("rho must be >= 0");
    const int d = p.shape.features;
    const double* x = p.values.data();
    double sum = 0.0;
    for (const Sample* s : b.samples) {
        check_binary_sample(*s, d);
        double t = 0.0;
        for (int i = 0; i < d; ++i) t += s->features[i] * x[i];
        sum += softplus(-s->label * t);
    }
    double reg = 0.0;
    for (int i = 0; i < d; ++i) reg += x[i] * x[i];
    return sum / static_cast<double>(b.samples.size()) + 0.5 * rho * reg;
}

GradVector logistic_grad(const ModelParams& p, const Batch& b, double rho) {
    require_logistic(p);
    if (b.samples.empty()) throw std::invalid_argument("empty batch");
    if (rho < 0.0) throw std::invalid_argument("rho must be >= 0");
    const int d = p.shape.features;
    const double* x = p.values.data();
    GradVector g(d, 0.0);
    for (const Sample* s : b.samples) {
        check_binary_sample(*s, d);
        double t = 0.0;
        for (int i = 0; i < d; ++i) t += s->features[i] * x[i];
        const double coef = -s->label * sigmoid(-s->label * t);
        for (int i = 0; i < d; ++i) g[i] += coef * s->features[i];
    }
    const double inv = 1.0 / static_cast<double>(b.samples.size());
    for (int i = 0; i < d; ++i) g[i] = g[i] * inv + rho * x[i];
    return g;
}

std::vector<double> mlp_forward(const ModelParams& p, const std::vector<double>& input) {
    require_mlp(p);
    if (static_cast<int>(input.size()) != p.shape.in)
        throw std::invalid_argument("input dimension mismatch");
    const MlpView m = mlp_view(p);
    std::vector<double> A1, H, L;
    mlp_forward_block(m, input.data(), 1, A1, H, L);
    softmax_xent_rows(L.data(), 1, m.out, nullptr);
    return L;
}

std::pair<double, GradVector> mlp_loss_grad(const ModelParams& p, const Batch& b) {
    require_mlp(p);
    if (b.samples.empty()) throw std::invalid_argument("empty batch");
    const MlpView m = mlp_view(p);
    const int n = static_cast<int>(b.samples.size());

    std::vector<double> X(static_cast<std::size_t>(n) * m.in);
    std::vector<int> y(n);
    for (int r = 0; r < n; ++r) {
        const Sample& s = *b.samples[r];
        check_class_sample(s, m.in, m.out);
        std::memcpy(X.data() + static_cast<std::size_t>(r) * m.in, s.features.data(),
                    sizeof(double) * m.in);
        y[r] = s.label;
    }

    std::vector<double> A1, H, L;
    mlp_forward_block(m, X.data(), n, A1, H, L);
    const double loss = softmax_xent_rows(L.data(), n, m.out, y.data()) / n;

    // L now holds probabilities; turn it into dLoss/dlogits = (P - Y)/n.
    const double invn = 1.0 / n;
    for (int r = 0; r < n; ++r) {
        double* d2 = L.data() + static_cast<std::size_t>(r) * m.out;
        d2[y[r]] -= 1.0;
        for (int j = 0; j < m.out; ++j) d2[j] *= invn;
    }

    GradVector grad(p.values.size(), 0.0);
    double* dW1 = grad.data();
    double* db1 = dW1 + static_cast<std::size_t>(m.hid) * m.in;
    double* dW2 = db1 + m.hid;
    double* db2 = dW2 + static_cast<std::size_t>(m.out) * m.hid;

    dgemm(CblasTrans, CblasNoTrans, m.out, m.hid, n, L.data(), m.out, H.data(), m.hid, dW2, m.hid);
    for (int r = 0; r < n; ++r) {
        const double* d2 = L.data() + static_cast<std::size_t>(r) * m.out;
        for (int j = 0; j < m.out; ++j) db2[j] += d2[j];
    }

    // delta1 = (delta2 W2) masked by the ReLU preactivation sign; reuse H.
    dgemm(CblasNoTrans, CblasNoTrans, n, m.hid, m.out, L.data(), m.out, m.W2, m.hid, H.data(), m.hid);
    for (std::size_t i = 0; i < A1.size(); ++i)
        if (A1[i] <= 0.0) H[i] = 0.0;

    dgemm(CblasTrans, CblasNoTrans, m.hid, m.in, n, H.data(), m.hid, X.data(), m.in, dW1, m.in);
    for (int r = 0; r < n; ++r) {
        const double* d1 = H.data() + static_cast<std::size_t>(r) * m.hid;
        for (int j = 0; j < m.hid; ++j) db1[j] += d1[j];
    }
    return {loss, std::move(grad)};
}

std::pair<double, double> dataset_loss_acc(const ModelParams& p, const Dataset& ds,
                                           double rho, int threads) {
    if (ds.samples.empty()) throw std::invalid_argument("empty dataset");
    const std::size_t n = ds.samples.size();
    constexpr std::size_t kChunk = 1024;
    const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> loss_part(n_chunks, 0.0);
    std::vector<std::size_t> hit_part(n_chunks, 0);

    const bool is_mlp = p.shape.kind == ModelShape::Kind::Mlp;
    if (is_mlp) {
        require_mlp(p);
        if (ds.label_kind != LabelKind::Class10)
            throw std::invalid_argument("mlp evaluation needs class labels");
    } else {
        require_logistic(p);
        if (ds.label_kind != LabelKind::Binary)
            throw std::invalid_argument("logistic evaluation needs binary labels");
    }

    auto eval_chunk = [&](std::size_t c) {
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(lo + kChunk, n);
        const int cn = static_cast<int>(hi - lo);
        double loss = 0.0;
        std::size_t hits = 0;
        if (is_mlp) {
            const MlpView m = mlp_view(p);
            std::vector<double> X(static_cast<std::size_t>(cn) * m.in);
            std::vector<int> y(cn);
            for (int r = 0; r < cn; ++r) {
                const Sample& s = ds.samples[lo + r];
                check_class_sample(s, m.in, m.out);
                std::memcpy(X.data() + static_cast<std::size_t>(r) * m.in,
                            s.features.data(), sizeof(double) * m.in);
                y[r] = s.label;
            }
            std::vector<double> A1, H, L;
            mlp_forward_block(m, X.data(), cn, A1, H, L);
            for (int r = 0; r < cn; ++r) {
                const double* l = L.data() + static_cast<std::size_t>(r) * m.out;
                double mx = l[0];
                int arg = 0;
                for (int j = 1; j < m.out; ++j)
                    if (l[j] > mx) { mx = l[j]; arg = j; }
                double s = 0.0;
                for (int j = 0; j < m.out; ++j) s += std::exp(l[j] - mx);
                loss += mx + std::log(s) - l[y[r]];
                if (arg == y[r]) ++hits;
            }
        } else {
            const int d = p.shape.features;
            const double* x = p.values.data();
            for (std::size_t i = lo; i < hi; ++i) {
                const Sample& s = ds.samples[i];
                check_binary_sample(s, d);
                double t = 0.0;
                for (int j = 0; j < d; ++j) t += s.features[j] * x[j];
                loss += softplus(-s.label * t);
                const int pred = t >= 0.0 ? 1 : -1; // sign(0) -> +1
                if (pred == s.label) ++hits;
            }
        }
        loss_part[c] = loss;
        hit_part[c] = hits;
    };

    const int nt = std::min<std::size_t>(default_threads(threads), n_chunks);
    if (nt <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) eval_chunk(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&] {
                for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1))
                    eval_chunk(c);
            });
        for (auto& th : pool) th.join();
    }

    // Fixed-order reduction keeps results independent of thread count.
    double loss = 0.0;
    std::size_t hits = 0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        loss += loss_part[c];
        hits += hit_part[c];
    }
    loss /= static_cast<double>(n);
    if (!is_mlp && rho > 0.0) {
        double reg = 0.0;
        for (double v : p.values) reg += v * v;
        loss += 0.5 * rho * reg;
    }
    return {loss, static_cast<double>(hits) / static_cast<double>(n)};
}

double top1_accuracy(const ModelParams& p, const Dataset& ds) {
    return dataset_loss_acc(p, ds, 0.0).second;
}

} // namespace byrd
