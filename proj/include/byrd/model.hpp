#ifndef BYRD_MODEL_HPP
#define BYRD_MODEL_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace byrd {

using GradVector = std::vector<double>;

enum class LabelKind { Binary, Class10 };

// Model architecture descriptor. Logistic uses `features` only; the MLP
// is a single-hidden-layer perceptron (in -> hidden -> out) with ReLU.
struct ModelShape {
    enum class Kind { Logistic, Mlp };
    Kind kind = Kind::Logistic;
    int features = 0;                  // logistic input dimension
    int in = 784, hidden = 32, out = 10;

    static ModelShape logistic(int m) {
        ModelShape s;
        s.kind = Kind::Logistic;
        s.features = m;
        return s;
    }
    static ModelShape mlp(int in = 784, int hidden = 32, int out = 10) {
        ModelShape s;
        s.kind = Kind::Mlp;
        s.in = in;
        s.hidden = hidden;
        s.out = out;
        return s;
    }

    std::size_t param_count() const {
        if (kind == Kind::Logistic) return static_cast<std::size_t>(features);
        return static_cast<std::size_t>(hidden) * in + hidden +
               static_cast<std::size_t>(out) * hidden + out;
    }
    LabelKind label_kind() const {
        return kind == Kind::Logistic ? LabelKind::Binary : LabelKind::Class10;
    }
    bool operator==(const ModelShape&) const = default;
};

// Flat parameter vector. MLP layout: W1 (hidden x in, row-major), b1,
// W2 (out x hidden, row-major), b2.
struct ModelParams {
    std::vector<double> values;
    ModelShape shape;
};

// One labeled example. `label` is -1/+1 for binary tasks, 0..9 for
// 10-class tasks.
struct Sample {
    std::vector<double> features;
    int label = 0;
};

// Mini-batch as non-owning views into a dataset; repeated entries are
// how with-replacement sampling shows up.
struct Batch {
    std::vector<const Sample*> samples;
};

struct Dataset {
    std::vector<Sample> samples;
    LabelKind label_kind = LabelKind::Binary;
    int feature_dim = 0;
    std::size_t size() const { return samples.size(); }
};

// Kaiming-normal weights / zero biases for the MLP; all-zero vector for
// the (convex) logistic model. Deterministic in `seed`.
ModelParams init_params(const ModelShape& shape, std::uint64_t seed);

double logistic_loss(const ModelParams& p, const Batch& b, double rho);
GradVector logistic_grad(const ModelParams& p, const Batch& b, double rho);

// Class probabilities for one input; softmax is evaluated with max-logit
// subtraction so huge logits stay finite.
std::vector<double> mlp_forward(const ModelParams& p, const std::vector<double>& input);

// Mean cross-entropy over the batch and its gradient by backprop.
std::pair<double, GradVector> mlp_loss_grad(const ModelParams& p, const Batch& b);

double top1_accuracy(const ModelParams& p, const Dataset& ds);

// Full-dataset mean loss and top-1 accuracy in one pass (single source of
// truth for both engine evaluation and top1_accuracy). `rho` only applies
// to the logistic loss. `threads` <= 0 picks a default.
std::pair<double, double> dataset_loss_acc(const ModelParams& p, const Dataset& ds,
                                           double rho, int threads = 0);

} // namespace byrd

#endif
