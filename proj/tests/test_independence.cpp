#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hocd/cumulants.hpp"
#include "hocd/independence.hpp"
#include "hocd/parallel.hpp"
#include "hocd/rng.hpp"

using namespace hocd;

namespace {

Series cubed(std::uint64_t seed, std::size_t n, const std::string& label) {
    Rng rng(seed);
    Series s;
    s.label = label;
    s.values.resize(n);
    for (auto& v : s.values) {
        const double z = rng.next_normal();
        v = z * z * z / std::sqrt(15.0);
    }
    return s;
}

}  // namespace

TEST_CASE("deterministic given the seed, and identical serial vs parallel") {
    const Series u = cubed(1, 300, "u");
    const Series v = cubed(2, 300, "v");
    const auto a = test_independence(u, {v}, 0.05, 199, 42);
    const auto b = test_independence(u, {v}, 0.05, 199, 42);
    CHECK(a.statistic == b.statistic);
    CHECK(a.p_value == b.p_value);

    set_parallel_enabled(false);
    const auto serial = test_independence(u, {v}, 0.05, 199, 42);
    set_parallel_enabled(true);
    CHECK(serial.statistic == a.statistic);
    CHECK(serial.p_value == a.p_value);

    const auto other = test_independence(u, {v}, 0.05, 199, 43);
    CHECK(other.statistic == a.statistic);  // statistic ignores the seed at this N
}

TEST_CASE("maximal dependence: p-value hits the floor") {
    const Series u = cubed(3, 250, "u");
    const auto res = test_independence(u, {u}, 0.05, 199, 7);
    CHECK_FALSE(res.independent);
    CHECK(res.p_value == doctest::Approx(1.0 / 200.0));
}

TEST_CASE("type-I error near the nominal level") {
    int rejections = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        const Series u = cubed(1000 + 2 * t, 60, "u");
        const Series v = cubed(1001 + 2 * t, 60, "v");
        const auto res = test_independence(u, {v}, 0.05, 99, 5000 + t);
        if (!res.independent) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / trials;
    CHECK(rate >= 0.03);
    CHECK(rate <= 0.08);
}

TEST_CASE("power against a linear signal") {
    int rejections = 0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
        Rng rng(9000 + t);
        Series u, v;
        u.label = "u";
        v.label = "v";
        u.values.resize(800);
        v.values.resize(800);
        for (std::size_t r = 0; r < u.values.size(); ++r) {
            const double z = rng.next_normal();
            u.values[r] = z * z * z / std::sqrt(15.0);
            v.values[r] = 0.5 * u.values[r] + rng.next_normal();
        }
        const auto res = test_independence(u, {v}, 0.05, 99, 333 + t);
        if (!res.independent) ++rejections;
    }
    CHECK(rejections >= 37);  // >= 92.5%

    // one full-size check at the benchmark scale
    Rng rng(99);
    Series u, v;
    u.label = "u";
    v.label = "v";
    u.values.resize(2000);
    v.values.resize(2000);
    for (std::size_t r = 0; r < u.values.size(); ++r) {
        const double z = rng.next_normal();
        u.values[r] = z * z * z / std::sqrt(15.0);
        v.values[r] = 0.5 * u.values[r] + rng.next_normal();
    }
    CHECK_FALSE(test_independence(u, {v}, 0.05, 199, 11).independent);
}

TEST_CASE("decision is invariant to positive rescaling of u") {
    for (int t = 0; t < 50; ++t) {
        const Series u = cubed(400 + 2 * t, 100, "u");
        const Series v = cubed(401 + 2 * t, 100, "v");
        const auto base = test_independence(u, {v}, 0.05, 99, 60 + t);
        for (const double c : {0.1, 10.0}) {
            Series su = u;
            for (auto& x : su.values) x *= c;
            const auto res = test_independence(su, {v}, 0.05, 99, 60 + t);
            CHECK(res.independent == base.independent);
        }
    }
}

TEST_CASE("multivariate blocks use a product kernel") {
    Rng rng(71);
    Series u, v1, v2;
    u.label = "u";
    v1.label = "v1";
    v2.label = "v2";
    u.values.resize(400);
    v1.values.resize(400);
    v2.values.resize(400);
    for (std::size_t r = 0; r < 400; ++r) {
        const double z = rng.next_normal();
        u.values[r] = z * z * z / std::sqrt(15.0);
        v1.values[r] = rng.next_normal();
        v2.values[r] = 0.6 * u.values[r] + rng.next_normal();  // signal hides in component 2
    }
    CHECK_FALSE(test_independence(u, {v1, v2}, 0.05, 199, 5).independent);

    Series w1 = cubed(72, 400, "w1"), w2 = cubed(73, 400, "w2");
    CHECK(test_independence(u, {w1, w2}, 0.05, 199, 6).independent);
}

TEST_CASE("subsampling caps the kernel size deterministically") {
    const Series u = cubed(81, 3000, "u");
    Series v = cubed(82, 3000, "v");
    for (std::size_t r = 0; r < v.values.size(); ++r) v.values[r] += 0.4 * u.values[r];
    const auto a = test_independence(u, {v}, 0.05, 99, 17, 500);
    const auto b = test_independence(u, {v}, 0.05, 99, 17, 500);
    CHECK(a.statistic == b.statistic);
    CHECK(a.p_value == b.p_value);
    CHECK_FALSE(a.independent);
}

TEST_CASE("input validation") {
    const Series u = cubed(91, 50, "u");
    Series shorter = cubed(92, 40, "v");
    CHECK_THROWS_AS(test_independence(u, {shorter}, 0.05, 99, 1), InputShapeError);
    const Series tiny = cubed(93, 10, "t");
    CHECK_THROWS_AS(test_independence(tiny, {tiny}, 0.05, 99, 1), SampleSizeError);
    CHECK_THROWS_AS(test_independence(u, {u}, 0.05, 50, 1), InputShapeError);
    CHECK_THROWS_AS(test_independence(u, {u}, 1.5, 99, 1), InputShapeError);
}
