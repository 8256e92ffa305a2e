#include "byrd/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace byrd;

TEST_SUITE("rng") {

TEST_CASE("same seed replays the same sequence") {
    RngStream a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
        CHECK(a.next_double() == b.next_double());
        CHECK(a.next_normal() == b.next_normal());
    }
}

TEST_CASE("uniform_index stays in range and covers it") {
    RngStream rng(7);
    std::set<std::size_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const std::size_t v = rng.uniform_index(13);
        CHECK(v < 13);
        seen.insert(v);
    }
    CHECK(seen.size() == 13);
    CHECK(rng.uniform_index(1) == 0);
}

TEST_CASE("normal draws have the right first two moments") {
    RngStream rng(123);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.next_normal();
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("shuffle is a permutation and seed-stable") {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    std::vector<int> w = v;
    RngStream a(5), b(5);
    a.shuffle(v);
    b.shuffle(w);
    CHECK(v == w);
    std::sort(w.begin(), w.end());
    std::vector<int> id(50);
    std::iota(id.begin(), id.end(), 0);
    CHECK(w == id);
}

} // TEST_SUITE
