#include "byrd/aggregate.hpp"

#include "byrd/rng.hpp"

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

using namespace byrd;

namespace {

std::vector<GradVector> random_grads(RngStream& rng, std::size_t n, std::size_t d,
                                     double scale = 1.0) {
    std::vector<GradVector> g(n, GradVector(d));
    for (auto& v : g)
        for (double& x : v) x = scale * rng.next_normal();
    return g;
}

double linf(const GradVector& a, const GradVector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_SUITE("aggregate") {

TEST_CASE("mean: basic identities and the summation oracle") {
    CHECK(agg_mean({{1, 0}, {0, 1}}) == GradVector{0.5, 0.5});
    const GradVector v = {2.5, -1.0, 0.0};
    CHECK(agg_mean({v, v, v, v}) == v);

    RngStream rng(1);
    const auto grads = random_grads(rng, 5, 7);
    const GradVector got = agg_mean(grads);
    for (std::size_t i = 0; i < 7; ++i) {
        double s = 0.0;
        for (const auto& g : grads) s += g[i];
        CHECK(got[i] == doctest::Approx(s / 5.0).epsilon(1e-15));
    }

    CHECK_THROWS_AS((void)agg_mean({}), std::invalid_argument);
    CHECK_THROWS_AS((void)agg_mean({{1.0, 2.0}, {1.0}}), std::invalid_argument);
}

TEST_CASE("cwmed: odd and even counts, sort oracle") {
    CHECK(agg_cwmed({{1, 5}, {2, 4}, {3, 3}}) == GradVector{2, 4});
    CHECK(agg_cwmed({{0, 0}, {10, 10}}) == GradVector{5, 5});

    RngStream rng(2);
    const auto grads = random_grads(rng, 7, 9, 3.0);
    const GradVector got = agg_cwmed(grads);
    for (std::size_t i = 0; i < 9; ++i) {
        std::vector<double> col;
        for (const auto& g : grads) col.push_back(g[i]);
        std::sort(col.begin(), col.end());
        CHECK(got[i] == col[3]);
    }
}

TEST_CASE("geomed: consensus, 1-D median, 2-D symmetric fixture") {
    const GradVector v = {1.0, -2.0, 0.5};
    CHECK(linf(agg_geomed({v, v, v}, 1e-8, 100), v) <= 1e-8);

    const GradVector m1 = agg_geomed({{0.0}, {1.0}, {10.0}}, 1e-8, 200);
    CHECK(m1[0] == doctest::Approx(1.0).epsilon(1e-4));

    const GradVector m2 =
        agg_geomed({{0, 0}, {2, 0}, {1, 1}, {1, -1}}, 1e-8, 200);
    CHECK(m2[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::fabs(m2[1]) <= 1e-6);
}

TEST_CASE("geomed: objective is monotone along the iteration trace") {
    RngStream rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        const auto grads = random_grads(rng, 3 + rng.uniform_index(8),
                                        1 + rng.uniform_index(4), 2.0);
        std::vector<double> trace;
        (void)agg_geomed(grads, 1e-10, 100, &trace);
        REQUIRE(trace.size() >= 2);
        for (std::size_t t = 1; t < trace.size(); ++t)
            CHECK(trace[t] <= trace[t - 1] + 1e-12 * (1.0 + trace[t - 1]));
    }
}

TEST_CASE("krum: outlier rejection and the brute-force oracle") {
    const GradVector v = {1.0, 1.0};
    std::vector<GradVector> grads(4, v);
    grads.push_back({100.0, -50.0});
    CHECK(agg_krum(grads, 1) == v);

    RngStream rng(4);
    for (int rep = 0; rep < 50; ++rep) {
        const auto g = random_grads(rng, 5, 3, 2.0);
        const int f = 1;
        // Exhaustive scoring: all candidates, all neighbour subsets by sort.
        std::size_t want = 0;
        double want_score = 1e300;
        for (std::size_t i = 0; i < 5; ++i) {
            std::vector<double> d;
            for (std::size_t j = 0; j < 5; ++j) {
                if (i == j) continue;
                double s = 0.0;
                for (std::size_t c = 0; c < 3; ++c)
                    s += (g[i][c] - g[j][c]) * (g[i][c] - g[j][c]);
                d.push_back(s);
            }
            std::sort(d.begin(), d.end());
            const double score = d[0] + d[1]; // N - f - 2 = 2 neighbours
            if (score < want_score) {
                want_score = score;
                want = i;
            }
        }
        CHECK(krum_select_index(g, f) == want);
        CHECK(agg_krum(g, f) == g[want]); // output is an input, verbatim
    }
}

TEST_CASE("krum: permutation invariance of the selected vector") {
    RngStream rng(5);
    const auto grads = random_grads(rng, 6, 4, 2.0);
    const GradVector a = agg_krum(grads, 1);
    std::vector<GradVector> shuffled = grads;
    rng.shuffle(shuffled);
    CHECK(agg_krum(shuffled, 1) == a);
}

TEST_CASE("krum: rejects too few inputs") {
    RngStream rng(6);
    const auto grads = random_grads(rng, 4, 2);
    CHECK_THROWS_AS((void)agg_krum(grads, 2), std::invalid_argument);
    CHECK_NOTHROW((void)agg_krum(grads, 1));
}

TEST_CASE("dispatch follows the rule kind") {
    RngStream rng(7);
    const auto grads = random_grads(rng, 5, 3);
    AggregationRule r;
    r.kind = AggregationRule::Kind::Mean;
    CHECK(aggregate(r, grads) == agg_mean(grads));
    r.kind = AggregationRule::Kind::CwMed;
    CHECK(aggregate(r, grads) == agg_cwmed(grads));
    r.kind = AggregationRule::Kind::GeoMed;
    CHECK(aggregate(r, grads) == agg_geomed(grads, r.geomed_tol, r.geomed_max_iter));
    r.kind = AggregationRule::Kind::Krum;
    r.krum_f = 1;
    CHECK(aggregate(r, grads) == agg_krum(grads, 1));
}

} // TEST_SUITE
