#include "byrd/data.hpp"

#include "byrd/gzip.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <stdexcept>

namespace byrd {

namespace {

constexpr int kCovtypeFeatures = 54;
constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(const char*& p, const char* end, const std::string& path,
                    std::size_t line_no) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    double v = 0.0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{}) parse_fail(path, line_no, "expected a number");
    p = next;
    return v;
}

std::uint32_t read_be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(std::uint8_t(v >> 24));
    out.push_back(std::uint8_t(v >> 16));
    out.push_back(std::uint8_t(v >> 8));
    out.push_back(std::uint8_t(v));
}

} // namespace

Dataset load_covtype(const std::string& path) {
    const std::vector<std::uint8_t> bytes = read_file_maybe_gzip(path);
    const char* cur = reinterpret_cast<const char*>(bytes.data());
    const char* end = cur + bytes.size();

    Dataset ds;
    ds.label_kind = LabelKind::Binary;
    ds.feature_dim = kCovtypeFeatures;

    std::size_t line_no = 0;
    bool libsvm = false, format_known = false;
    while (cur < end) {
        ++line_no;
        const char* eol = static_cast<const char*>(std::memchr(cur, '\n', end - cur));
        const char* line_end = eol ? eol : end;
        const char* p = cur;
        cur = eol ? eol + 1 : end;
        while (p < line_end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p == line_end) continue; // blank line

        if (!format_known) {
            libsvm = std::memchr(p, ':', line_end - p) != nullptr;
            format_known = true;
        }

        Sample s;
        s.features.assign(kCovtypeFeatures, 0.0);
        long raw_label;
        if (libsvm) {
            raw_label = std::lround(parse_double(p, line_end, path, line_no));
            while (true) {
                while (p < line_end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
                if (p == line_end) break;
                long idx = 0;
                auto [next, ec] = std::from_chars(p, line_end, idx);
                if (ec != std::errc{} || next == line_end || *next != ':')
                    parse_fail(path, line_no, "expected idx:value pair");
                p = next + 1;
                const double v = parse_double(p, line_end, path, line_no);
                if (idx < 1 || idx > kCovtypeFeatures)
                    parse_fail(path, line_no, "feature index " + std::to_string(idx) +
                                                  " out of range 1..54");
                s.features[idx - 1] = v;
            }
        } else {
            for (int i = 0; i < kCovtypeFeatures; ++i) {
                s.features[i] = parse_double(p, line_end, path, line_no);
                while (p < line_end && (*p == ' ' || *p == '\t')) ++p;
                if (p == line_end || *p != ',')
                    parse_fail(path, line_no, "expected 54 features and a label");
                ++p;
            }
            raw_label = std::lround(parse_double(p, line_end, path, line_no));
            while (p < line_end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
            if (p != line_end) parse_fail(path, line_no, "trailing data after label");
        }
        s.label = raw_label == 2 ? 1 : -1;
        ds.samples.push_back(std::move(s));
    }
    if (ds.samples.empty()) throw std::runtime_error(path + ": no samples");
    return ds;
}

Dataset load_mnist(const std::string& images_path, const std::string& labels_path) {
    const std::vector<std::uint8_t> img = read_file_maybe_gzip(images_path);
    const std::vector<std::uint8_t> lab = read_file_maybe_gzip(labels_path);
    if (img.size() < 16 || read_be32(img.data()) != kIdxImagesMagic)
        throw std::runtime_error(images_path + ": bad IDX image magic");
    if (lab.size() < 8 || read_be32(lab.data()) != kIdxLabelsMagic)
        throw std::runtime_error(labels_path + ": bad IDX label magic");
    const std::uint32_t n = read_be32(img.data() + 4);
    const std::uint32_t rows = read_be32(img.data() + 8);
    const std::uint32_t cols = read_be32(img.data() + 12);
    const std::uint32_t n_lab = read_be32(lab.data() + 4);
    if (n != n_lab)
        throw std::runtime_error("image/label count mismatch: " + std::to_string(n) +
                                 " vs " + std::to_string(n_lab));
    const std::size_t dim = std::size_t(rows) * cols;
    if (img.size() != 16 + std::size_t(n) * dim)
        throw std::runtime_error(images_path + ": truncated image payload");
    if (lab.size() != 8 + std::size_t(n))
        throw std::runtime_error(labels_path + ": truncated label payload");

    Dataset ds;
    ds.label_kind = LabelKind::Class10;
    ds.feature_dim = static_cast<int>(dim);
    ds.samples.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        Sample& s = ds.samples[i];
        const std::uint8_t* px = img.data() + 16 + std::size_t(i) * dim;
        s.features.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) s.features[j] = px[j] / 255.0;
        const std::uint8_t l = lab[8 + i];
        if (l > 9)
            throw std::runtime_error(labels_path + ": label " + std::to_string(l) +
                                     " out of range");
        s.label = l;
    }
    return ds;
}

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>>
write_mnist_idx(const Dataset& ds, int rows, int cols) {
    if (ds.feature_dim != rows * cols)
        throw std::invalid_argument("rows*cols does not match feature_dim");
    std::vector<std::uint8_t> img, lab;
    img.reserve(16 + ds.samples.size() * std::size_t(ds.feature_dim));
    write_be32(img, kIdxImagesMagic);
    write_be32(img, static_cast<std::uint32_t>(ds.samples.size()));
    write_be32(img, static_cast<std::uint32_t>(rows));
    write_be32(img, static_cast<std::uint32_t>(cols));
    write_be32(lab, kIdxLabelsMagic);
    write_be32(lab, static_cast<std::uint32_t>(ds.samples.size()));
    for (const Sample& s : ds.samples) {
        for (double v : s.features) {
            long b = std::lround(v * 255.0);
            img.push_back(static_cast<std::uint8_t>(std::clamp(b, 0L, 255L)));
        }
        lab.push_back(static_cast<std::uint8_t>(s.label));
    }
    return {std::move(img), std::move(lab)};
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must be in (0,1)");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
        by_class[ds.samples[i].label].push_back(i);

    RngStream rng(spec.seed);
    std::vector<std::size_t> train_idx, test_idx;
    for (auto& [label, idx] : by_class) {
        if (idx.size() < 2)
            throw std::runtime_error("class " + std::to_string(label) +
                                     " has fewer than 2 samples");
        rng.shuffle(idx);
        auto n_train = static_cast<std::size_t>(
            std::llround(spec.train_fraction * static_cast<double>(idx.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + n_train);
        test_idx.insert(test_idx.end(), idx.begin() + n_train, idx.end());
    }
    // Keep original dataset order inside each split.
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    auto materialize = [&](const std::vector<std::size_t>& idx) {
        Dataset out;
        out.label_kind = ds.label_kind;
        out.feature_dim = ds.feature_dim;
        out.samples.reserve(idx.size());
        for (std::size_t i : idx) out.samples.push_back(ds.samples[i]);
        return out;
    };
    return {materialize(train_idx), materialize(test_idx)};
}

std::vector<WorkerShard> partition_uniform(const Dataset& train, int n_workers,
                                           std::uint64_t seed) {
    if (n_workers < 1) throw std::invalid_argument("need at least one worker");
    const std::size_t n = train.samples.size();
    if (static_cast<std::size_t>(n_workers) > n)
        throw std::invalid_argument("more workers than training samples");

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    RngStream rng(seed);
    rng.shuffle(perm);

    std::vector<WorkerShard> shards(n_workers);
    const std::size_t base = n / n_workers;
    const std::size_t extra = n % n_workers;
    std::size_t pos = 0;
    for (int w = 0; w < n_workers; ++w) {
        const std::size_t take = base + (static_cast<std::size_t>(w) < extra ? 1 : 0);
        shards[w].worker_id = w + 1;
        shards[w].indices.assign(perm.begin() + pos, perm.begin() + pos + take);
        pos += take;
    }
    return shards;
}

Batch sample_minibatch(const Dataset& ds, const WorkerShard& shard, int batch_size,
                       RngStream& rng) {
    if (shard.indices.empty()) throw std::invalid_argument("empty shard");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    Batch b;
    b.samples.reserve(batch_size);
    for (int i = 0; i < batch_size; ++i) {
        const std::size_t j = rng.uniform_index(shard.indices.size());
        b.samples.push_back(&ds.samples[shard.indices[j]]);
    }
    return b;
}

Dataset synth_dataset(SyntheticKind kind, int n, int dim, std::uint64_t seed) {
    if (n < 1 || dim < 1) throw std::invalid_argument("need n >= 1 and dim >= 1");
    RngStream rng(seed);
    Dataset ds;
    ds.feature_dim = dim;
    ds.samples.reserve(n);

    if (kind == SyntheticKind::Binary) {
        ds.label_kind = LabelKind::Binary;
        // Unit separating direction; every sample gets margin >= 0.5 along
        // it plus noise orthogonal to it.
        std::vector<double> w(dim);
        double norm = 0.0;
        for (double& v : w) {
            v = rng.next_normal();
            norm += v * v;
        }
        norm = std::sqrt(norm);
        for (double& v : w) v /= norm;
        for (int i = 0; i < n; ++i) {
            const int y = i % 2 == 0 ? 1 : -1;
            const double margin = 0.5 + std::fabs(rng.next_normal());
            Sample s;
            s.label = y;
            s.features.resize(dim);
            double dot = 0.0;
            for (int j = 0; j < dim; ++j) {
                s.features[j] = rng.next_normal();
                dot += s.features[j] * w[j];
            }
            for (int j = 0; j < dim; ++j)
                s.features[j] = 0.3 * (s.features[j] - dot * w[j]) + y * margin * w[j];
            ds.samples.push_back(std::move(s));
        }
    } else {
        ds.label_kind = LabelKind::Class10;
        std::vector<std::vector<double>> centers(10, std::vector<double>(dim));
        for (auto& c : centers) {
            double norm = 0.0;
            for (double& v : c) {
                v = rng.next_normal();
                norm += v * v;
            }
            norm = std::sqrt(norm);
            for (double& v : c) v = 4.0 * v / norm;
        }
        for (int i = 0; i < n; ++i) {
            const int y = i % 10;
            Sample s;
            s.label = y;
            s.features.resize(dim);
            for (int j = 0; j < dim; ++j)
                s.features[j] = centers[y][j] + 0.5 * rng.next_normal();
            ds.samples.push_back(std::move(s));
        }
    }
    return ds;
}

} // namespace byrd
