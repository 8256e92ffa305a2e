#include "byrd/rng.hpp"

#include <cmath>

namespace byrd {

std::size_t RngStream::uniform_index(std::size_t n) {
    // Rejection sampling over the top of the 64-bit range.
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
        r = gen_();
    } while (r >= limit);
    return static_cast<std::size_t>(r % bound);
}

double RngStream::next_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller on (0,1] uniforms; u1 > 0 so the log is finite.
    double u1;
    do {
        u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

} // namespace byrd
