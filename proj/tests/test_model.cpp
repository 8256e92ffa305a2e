#include "byrd/model.hpp"

#include "byrd/rng.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>

using namespace byrd;

namespace {

Batch make_batch(const std::vector<Sample>& store) {
    Batch b;
    for (const Sample& s : store) b.samples.push_back(&s);
    return b;
}

Sample binary_sample(std::vector<double> f, int y) {
    Sample s;
    s.features = std::move(f);
    s.label = y;
    return s;
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("logistic init is all zeros") {
    const ModelParams p = init_params(ModelShape::logistic(54), 123);
    CHECK(p.values.size() == 54);
    for (double v : p.values) CHECK(v == 0.0);
}

TEST_CASE("mlp init: deterministic, Kaiming variance, zero biases") {
    const ModelShape shape = ModelShape::mlp();
    const ModelParams a = init_params(shape, 1);
    const ModelParams b = init_params(shape, 1);
    CHECK(a.values == b.values);
    CHECK(a.values.size() == 25450);

    // W1 sample variance vs 2/784 (25,088 draws).
    const std::size_t n1 = 32 * 784;
    double mean = 0.0;
    for (std::size_t i = 0; i < n1; ++i) mean += a.values[i];
    mean /= n1;
    double var = 0.0;
    for (std::size_t i = 0; i < n1; ++i) var += (a.values[i] - mean) * (a.values[i] - mean);
    var /= n1 - 1;
    const double want = 2.0 / 784.0;
    CHECK(var == doctest::Approx(want).epsilon(0.20));

    for (int j = 0; j < 32; ++j) CHECK(a.values[n1 + j] == 0.0); // b1
    const std::size_t b2_off = n1 + 32 + 10 * 32;
    for (int j = 0; j < 10; ++j) CHECK(a.values[b2_off + j] == 0.0); // b2

    const ModelParams c = init_params(shape, 2);
    CHECK(c.values != a.values);
}

TEST_CASE("logistic loss at the origin is ln 2, with or without rho") {
    ModelParams p = init_params(ModelShape::logistic(3), 0);
    std::vector<Sample> store = {binary_sample({1.0, 2.0, -0.5}, 1),
                                 binary_sample({-3.0, 0.25, 4.0}, -1)};
    const Batch b = make_batch(store);
    CHECK(logistic_loss(p, b, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // The regulariser vanishes at the origin.
    CHECK(logistic_loss(p, b, 0.01) == logistic_loss(p, b, 0.0));
}

TEST_CASE("logistic loss hand example: ln(4/3)") {
    ModelParams p;
    p.shape = ModelShape::logistic(3);
    p.values = {std::log(3.0), 0.0, 0.0};
    std::vector<Sample> store = {binary_sample({1.0, 0.0, 0.0}, 1)};
    CHECK(logistic_loss(p, make_batch(store), 0.0) ==
          doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("regularizer adds exactly rho/2 |x|^2") {
    RngStream rng(9);
    ModelParams p;
    p.shape = ModelShape::logistic(8);
    p.values.resize(8);
    double sq = 0.0;
    for (double& v : p.values) {
        v = rng.next_normal();
        sq += v * v;
    }
    std::vector<Sample> store;
    for (int i = 0; i < 5; ++i) {
        Sample s;
        s.features.resize(8);
        for (double& f : s.features) f = rng.next_normal();
        s.label = i % 2 == 0 ? 1 : -1;
        store.push_back(std::move(s));
    }
    const Batch b = make_batch(store);
    const double with = logistic_loss(p, b, 0.37);
    const double without = logistic_loss(p, b, 0.0);
    CHECK(std::fabs(with - without - 0.5 * 0.37 * sq) <= 1e-12);
    CHECK(without >= 0.0);
}

TEST_CASE("logistic gradient at origin is -phi/2 for a positive sample") {
    ModelParams p = init_params(ModelShape::logistic(3), 0);
    std::vector<Sample> store = {binary_sample({2.0, -1.0, 0.5}, 1)};
    const GradVector g = logistic_grad(p, make_batch(store), 0.0);
    CHECK(g[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(g[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g[2] == doctest::Approx(-0.25).epsilon(1e-14));
}

TEST_CASE("duplicated sample gives the same gradient as the single sample") {
    RngStream rng(4);
    ModelParams p;
    p.shape = ModelShape::logistic(6);
    p.values.resize(6);
    for (double& v : p.values) v = rng.next_normal();
    Sample s;
    s.features.resize(6);
    for (double& f : s.features) f = rng.next_normal();
    s.label = -1;
    std::vector<Sample> one = {s}, two = {s, s};
    const GradVector g1 = logistic_grad(p, make_batch(one), 0.01);
    const GradVector g2 = logistic_grad(p, make_batch(two), 0.01);
    CHECK(g1 == g2);
}

TEST_CASE("logistic gradient matches central finite differences") {
    RngStream rng(11);
    const int d = 10;
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        ModelParams p;
        p.shape = ModelShape::logistic(d);
        p.values.resize(d);
        for (double& v : p.values) v = rng.next_normal();
        std::vector<Sample> store(3);
        for (Sample& s : store) {
            s.features.resize(d);
            for (double& f : s.features) f = rng.next_normal();
            s.label = rng.next_double() < 0.5 ? -1 : 1;
        }
        const Batch b = make_batch(store);
        const GradVector g = logistic_grad(p, b, 0.01);
        const double h = 1e-5;
        for (int i = 0; i < d; ++i) {
            const double save = p.values[i];
            p.values[i] = save + h;
            const double up = logistic_loss(p, b, 0.01);
            p.values[i] = save - h;
            const double dn = logistic_loss(p, b, 0.01);
            p.values[i] = save;
            const double fd = (up - dn) / (2 * h);
            worst = std::max(worst,
                             std::fabs(g[i] - fd) / std::max({1.0, std::fabs(g[i])}));
        }
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("mlp forward: zero params give the uniform distribution") {
    const ModelParams p = init_params(ModelShape::mlp(12, 5, 10), 0);
    ModelParams zeros = p;
    std::fill(zeros.values.begin(), zeros.values.end(), 0.0);
    const std::vector<double> in(12, 0.7);
    const auto probs = mlp_forward(zeros, in);
    REQUIRE(probs.size() == 10);
    for (double v : probs) CHECK(v == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("mlp forward: softmax shift invariance and normalization") {
    RngStream rng(3);
    const ModelShape shape = ModelShape::mlp(6, 4, 10);
    ModelParams p = init_params(shape, 17);
    std::vector<double> in(6);
    for (double& v : in) v = rng.next_double();
    const auto base = mlp_forward(p, in);

    // Shifting every logit by a constant (through b2) keeps probabilities.
    ModelParams shifted = p;
    const std::size_t b2_off = shape.param_count() - 10;
    for (int j = 0; j < 10; ++j) shifted.values[b2_off + j] += 123.456;
    const auto moved = mlp_forward(shifted, in);
    for (int j = 0; j < 10; ++j)
        CHECK(moved[j] == doctest::Approx(base[j]).epsilon(1e-12));

    // Logit magnitudes up to ~700 stay normalised.
    ModelParams huge = p;
    for (int j = 0; j < 10; ++j)
        huge.values[b2_off + j] = j % 2 == 0 ? 700.0 : -700.0;
    const auto hp = mlp_forward(huge, in);
    double sum = 0.0;
    for (double v : hp) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(std::isfinite(v));
        sum += v;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
}

TEST_CASE("mlp forward at input zero matches a direct re-evaluation") {
    const ModelShape shape = ModelShape::mlp(7, 5, 10);
    ModelParams p = init_params(shape, 23);
    // Give the biases some signal so ReLU(b1) is non-trivial.
    RngStream rng(29);
    const std::size_t b1_off = std::size_t(5) * 7;
    for (int j = 0; j < 5; ++j) p.values[b1_off + j] = rng.next_normal();
    const std::size_t b2_off = shape.param_count() - 10;
    for (int j = 0; j < 10; ++j) p.values[b2_off + j] = rng.next_normal();

    const auto got = mlp_forward(p, std::vector<double>(7, 0.0));

    // Independent arithmetic: softmax(W2 relu(b1) + b2).
    std::vector<double> h(5), logits(10);
    for (int j = 0; j < 5; ++j) h[j] = std::max(p.values[b1_off + j], 0.0);
    const std::size_t w2_off = b1_off + 5;
    for (int o = 0; o < 10; ++o) {
        double t = p.values[b2_off + o];
        for (int j = 0; j < 5; ++j) t += p.values[w2_off + o * 5 + j] * h[j];
        logits[o] = t;
    }
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double z = 0.0;
    for (double v : logits) z += std::exp(v - mx);
    for (int o = 0; o < 10; ++o)
        CHECK(got[o] == doctest::Approx(std::exp(logits[o] - mx) / z).epsilon(1e-12));
}

TEST_CASE("mlp loss at zero params is ln 10") {
    const ModelShape shape = ModelShape::mlp(9, 4, 10);
    ModelParams zeros;
    zeros.shape = shape;
    zeros.values.assign(shape.param_count(), 0.0);
    RngStream rng(31);
    std::vector<Sample> store(6);
    for (Sample& s : store) {
        s.features.resize(9);
        for (double& f : s.features) f = rng.next_double();
        s.label = static_cast<int>(rng.uniform_index(10));
    }
    const auto [loss, grad] = mlp_loss_grad(zeros, make_batch(store));
    CHECK(loss == doctest::Approx(std::log(10.0)).epsilon(1e-12));
    CHECK(grad.size() == shape.param_count());
}

TEST_CASE("mlp: a sample repeated twice gives the identical loss and gradient") {
    const ModelShape shape = ModelShape::mlp(8, 4, 10);
    const ModelParams p = init_params(shape, 5);
    RngStream rng(37);
    Sample s;
    s.features.resize(8);
    for (double& f : s.features) f = rng.next_double();
    s.label = 3;
    std::vector<Sample> one = {s}, two = {s, s};
    const auto [l1, g1] = mlp_loss_grad(p, make_batch(one));
    const auto [l2, g2] = mlp_loss_grad(p, make_batch(two));
    CHECK(l1 == l2);
    CHECK(g1 == g2);
}

TEST_CASE("mlp gradient matches finite differences on sampled coordinates") {
    const ModelShape shape = ModelShape::mlp(15, 6, 10);
    RngStream rng(41);
    ModelParams p = init_params(shape, 43);
    std::vector<Sample> store(4);
    for (Sample& s : store) {
        s.features.resize(15);
        for (double& f : s.features) f = rng.next_double();
        s.label = static_cast<int>(rng.uniform_index(10));
    }
    const Batch b = make_batch(store);
    const auto [loss, g] = mlp_loss_grad(p, b);
    CHECK(loss >= 0.0);
    const double h = 1e-5;
    double num = 0.0, den = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t i = rng.uniform_index(p.values.size());
        const double save = p.values[i];
        p.values[i] = save + h;
        const double up = mlp_loss_grad(p, b).first;
        p.values[i] = save - h;
        const double dn = mlp_loss_grad(p, b).first;
        p.values[i] = save;
        const double fd = (up - dn) / (2 * h);
        num += (g[i] - fd) * (g[i] - fd);
        den += g[i] * g[i];
    }
    CHECK(std::sqrt(num) / std::max(std::sqrt(den), 1e-12) <= 1e-4);
}

TEST_CASE("top-1 accuracy: ties, signs and the perfect classifier") {
    // Zero MLP params on a balanced set: argmax tie-break selects class 0.
    const ModelShape shape = ModelShape::mlp(4, 3, 10);
    ModelParams zeros;
    zeros.shape = shape;
    zeros.values.assign(shape.param_count(), 0.0);
    Dataset ds;
    ds.label_kind = LabelKind::Class10;
    ds.feature_dim = 4;
    for (int i = 0; i < 40; ++i) {
        Sample s;
        s.features.assign(4, 0.25 * i);
        s.label = i % 10;
        ds.samples.push_back(std::move(s));
    }
    CHECK(top1_accuracy(zeros, ds) == doctest::Approx(0.1));

    // Logistic sign(0) -> +1.
    ModelParams lz = init_params(ModelShape::logistic(2), 0);
    Dataset bin;
    bin.label_kind = LabelKind::Binary;
    bin.feature_dim = 2;
    for (int i = 0; i < 4; ++i) {
        Sample s;
        s.features = {double(i), 1.0};
        s.label = i < 3 ? 1 : -1;
        bin.samples.push_back(std::move(s));
    }
    CHECK(top1_accuracy(lz, bin) == doctest::Approx(0.75));

    // A separating direction classifies its own labels perfectly.
    ModelParams w;
    w.shape = ModelShape::logistic(2);
    w.values = {1.0, 0.0};
    Dataset sep;
    sep.label_kind = LabelKind::Binary;
    sep.feature_dim = 2;
    for (int i = 0; i < 10; ++i) {
        Sample s;
        s.features = {i < 5 ? 1.0 : -1.0, 0.3};
        s.label = i < 5 ? 1 : -1;
        sep.samples.push_back(std::move(s));
    }
    CHECK(top1_accuracy(w, sep) == 1.0);
}

TEST_CASE("dataset_loss_acc is independent of the thread count") {
    const ModelShape shape = ModelShape::mlp(10, 5, 10);
    const ModelParams p = init_params(shape, 77);
    RngStream rng(78);
    Dataset ds;
    ds.label_kind = LabelKind::Class10;
    ds.feature_dim = 10;
    for (int i = 0; i < 3000; ++i) {
        Sample s;
        s.features.resize(10);
        for (double& f : s.features) f = rng.next_double();
        s.label = static_cast<int>(rng.uniform_index(10));
        ds.samples.push_back(std::move(s));
    }
    const auto a = dataset_loss_acc(p, ds, 0.0, 1);
    const auto b = dataset_loss_acc(p, ds, 0.0, 2);
    const auto c = dataset_loss_acc(p, ds, 0.0, 7);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    CHECK(a.first == c.first);
}

TEST_CASE("label and shape mismatches are rejected") {
    const ModelParams mlp = init_params(ModelShape::mlp(4, 3, 10), 1);
    const ModelParams log = init_params(ModelShape::logistic(4), 1);
    Sample sbin;
    sbin.features.assign(4, 0.5);
    sbin.label = -1;
    std::vector<Sample> store = {sbin};
    CHECK_THROWS_AS((void)mlp_loss_grad(mlp, make_batch(store)), std::invalid_argument);
    CHECK_THROWS_AS((void)logistic_loss(mlp, make_batch(store), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)mlp_forward(mlp, std::vector<double>(3, 0.0)),
                    std::invalid_argument);
    Dataset empty;
    empty.label_kind = LabelKind::Binary;
    empty.feature_dim = 4;
    CHECK_THROWS_AS((void)top1_accuracy(log, empty), std::invalid_argument);
}

} // TEST_SUITE
