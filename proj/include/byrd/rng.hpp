#ifndef BYRD_RNG_HPP
#define BYRD_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace byrd {

// Deterministic random stream. All draws are built on top of the
// mt19937_64 integer output only, so sequences are reproducible across
// standard-library implementations (std::normal_distribution and friends
// are not pinned by the standard).
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Unbiased uniform index in [0, n). n must be >= 1.
    std::size_t uniform_index(std::size_t n);

    // Standard normal via Box-Muller; one spare value is cached.
    double next_normal();

    double normal(double mean, double stddev) {
        return mean + stddev * next_normal();
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = uniform_index(i + 1);
            std::swap(v[i], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream-name constants for deriving per-purpose seeds from a run seed.
// Worker n (1-based) uses seed ^ n; these cover everything else.
inline constexpr std::uint64_t kAttackStreamTag = 0xA11ACE;
inline constexpr std::uint64_t kDataStreamTag = 0x5EED;

} // namespace byrd

#endif
