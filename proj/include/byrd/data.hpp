#ifndef BYRD_DATA_HPP
#define BYRD_DATA_HPP

#include "byrd/model.hpp"
#include "byrd/rng.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace byrd {

// Index range owned by one honest worker. Shards of a training set are
// pairwise disjoint and cover it; sizes differ by at most one.
struct WorkerShard {
    int worker_id = 0; // 1-based
    std::vector<std::size_t> indices;
};

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
};

enum class SyntheticKind { Binary, Class10 };

// Forest CoverType, binarised: class 2 -> +1, everything else -> -1.
// Accepts LIBSVM (`label idx:val ...`, 1-based) or CSV (54 features then
// the label) layouts; gzipped files are handled transparently.
Dataset load_covtype(const std::string& path);

// IDX image/label pair (big-endian, magics 0x803 / 0x801). Pixels are
// scaled to [0,1] by dividing the raw byte by 255.
Dataset load_mnist(const std::string& images_path, const std::string& labels_path);

// Serialises a 28x28-style image dataset back to IDX bytes (images,
// labels); inverse of load_mnist for byte-preserving round trips.
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>>
write_mnist_idx(const Dataset& ds, int rows, int cols);

// Per-class proportional split; each class lands within one sample of
// the requested fraction. Every class needs >= 2 samples.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitSpec& spec);

// Random permutation cut into H near-equal contiguous chunks.
std::vector<WorkerShard> partition_uniform(const Dataset& train, int n_workers,
                                           std::uint64_t seed);

// B indices drawn uniformly with replacement from the shard.
Batch sample_minibatch(const Dataset& ds, const WorkerShard& shard, int batch_size,
                       RngStream& rng);

// Deterministic fixtures: linearly separable two-class Gaussians
// (margin >= 0.5) or balanced 10-class blobs.
Dataset synth_dataset(SyntheticKind kind, int n, int dim, std::uint64_t seed);

} // namespace byrd

#endif
