#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hocd/cumulants.hpp"
#include "hocd/rng.hpp"
#include "oracle_cumulants.hpp"

using namespace hocd;

namespace {

Series cubed_series(std::uint64_t seed, std::size_t n, const std::string& label = "x") {
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

double double_factorial(int n) {
    double r = 1.0;
    for (int k = n; k > 1; k -= 2) r *= k;
    return r;
}

}  // namespace

TEST_CASE("center subtracts the mean and nothing else") {
    Dataset d;
    d.columns.push_back({{1, 2, 3}, "a"});
    d.columns.push_back({{-1, 1}, "b"});
    d.columns.push_back({{5, 5, 5}, "c"});
    // columns are independent of each other here; ragged lengths are fine for center
    const Dataset c = center(d);
    CHECK(c.columns[0].values == std::vector<double>{-1, 0, 1});
    CHECK(c.columns[1].values == std::vector<double>{-1, 1});
    CHECK(c.columns[2].values == std::vector<double>{0, 0, 0});

    Dataset bad;
    bad.columns.push_back({{}, "empty"});
    CHECK_THROWS_AS(center(bad), InputShapeError);
}

TEST_CASE("order-2 joint cumulant is the unbiased covariance") {
    Rng rng(7);
    Dataset d;
    d.columns.push_back({{}, "x"});
    d.columns.push_back({{}, "y"});
    for (int i = 0; i < 50; ++i) {
        d.columns[0].values.push_back(rng.next_normal());
        d.columns[1].values.push_back(rng.next_normal());
    }
    d = center(d);
    const auto est = joint_cumulant(d, {{"x", "y"}});
    double cov = 0.0;
    for (int i = 0; i < 50; ++i) cov += d.columns[0].values[i] * d.columns[1].values[i];
    cov /= 49.0;
    CHECK(est.value == doctest::Approx(cov).epsilon(1e-12));
    CHECK(est.order == 2);

    // self-pair with unit sample variance
    Dataset u;
    u.columns.push_back(d.columns[0]);
    const double var = joint_cumulant(u, {{"x", "x"}}).value;
    for (auto& v : u.columns[0].values) v /= std::sqrt(var);
    CHECK(joint_cumulant(u, {{"x", "x"}}).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("orders 2-4 match the partition-sum oracle on small samples") {
    Rng rng(11);
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t n = 8 + rng.next_below(12);
        std::vector<std::vector<double>> base(3, std::vector<double>(n));
        for (auto& col : base)
            for (auto& v : col) {
                const double z = rng.next_normal();
                v = z * z * z;
            }
        const int order = 2 + static_cast<int>(rng.next_below(3));
        std::vector<std::span<const double>> cols;
        for (int k = 0; k < order; ++k) cols.emplace_back(base[rng.next_below(3)]);
        const double mine = kstat(cols);
        const double oracle = testoracle::oracle_cumulant(cols);
        CHECK(mine == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("univariate k-statistics match the oracle up to order 6") {
    Rng rng(12);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 9 + rng.next_below(3);
        std::vector<double> x(n);
        for (auto& v : x) v = rng.next_normal() + 0.3;
        for (int order = 2; order <= 6; ++order) {
            std::vector<std::span<const double>> cols(order, std::span<const double>(x));
            const double mine = kstat_uni(x, order);
            const double oracle = testoracle::oracle_cumulant(cols);
            CHECK(mine == doctest::Approx(oracle).epsilon(1e-9));
        }
    }
}

TEST_CASE("joint cumulant is exactly symmetric and multilinear") {
    Rng rng(13);
    const std::size_t n = 40;
    std::vector<std::vector<double>> base(4, std::vector<double>(n));
    for (auto& col : base)
        for (auto& v : col) v = rng.next_normal();

    std::vector<std::span<const double>> cols{base[0], base[1], base[2], base[3]};
    const double reference = kstat(cols);
    std::vector<int> perm{0, 1, 2, 3};
    std::sort(perm.begin(), perm.end());
    do {
        std::vector<std::span<const double>> permuted;
        for (const int i : perm) permuted.emplace_back(base[i]);
        CHECK(kstat(permuted) == doctest::Approx(reference).epsilon(1e-12));
    } while (std::next_permutation(perm.begin(), perm.end()));

    // linear in each slot as a polynomial identity
    std::vector<double> combo(n);
    const double a = 0.7, b = -1.3;
    for (std::size_t r = 0; r < n; ++r) combo[r] = a * base[0][r] + b * base[1][r];
    std::vector<std::span<const double>> left{combo, base[2], base[3], base[1]};
    std::vector<std::span<const double>> right1{base[0], base[2], base[3], base[1]};
    std::vector<std::span<const double>> right2{base[1], base[2], base[3], base[1]};
    CHECK(kstat(left) ==
          doctest::Approx(a * kstat(right1) + b * kstat(right2)).epsilon(1e-10));
}

TEST_CASE("fourth cumulant of proportional columns: exact multilinearity, oracle limit") {
    const Series l = cubed_series(21, 200000, "l");
    Dataset d;
    d.columns.push_back({l.values, "x1"});
    d.columns.push_back({l.values, "x2"});
    const double a1 = 0.6, a2 = 1.7;
    for (auto& v : d.columns[0].values) v *= a1;
    for (auto& v : d.columns[1].values) v *= a2;
    d = center(d);

    const double k4l = kstat_uni(center(Dataset{{l}}).columns[0].values, 4);
    const auto est = joint_cumulant(d, {{"x1", "x1", "x2", "x2"}});
    CHECK(est.value == doctest::Approx(a1 * a1 * a2 * a2 * k4l).epsilon(1e-9));

    // kappa4 of the standardized cubed Gaussian from E[Z^{2k}] = (2k-1)!!
    const double kappa4 =
        (double_factorial(11) - 3.0 * double_factorial(5) * double_factorial(5)) /
        (double_factorial(5) * double_factorial(5));
    CHECK(kappa4 == doctest::Approx(43.2));
    const double se = std::sqrt(double_factorial(23) / std::pow(15.0, 4) / 200000.0);
    CHECK(std::abs(k4l - kappa4) < 5.0 * se);
}

TEST_CASE("gaussian data: order-4 cumulant concentrates at zero") {
    Rng rng(31);
    Dataset d;
    d.columns.push_back({{}, "z"});
    d.columns[0].values.resize(100000);
    for (auto& v : d.columns[0].values) v = rng.next_normal();
    d = center(d);
    const auto est = joint_cumulant(d, {{"z", "z", "z", "z"}});
    CHECK(std::abs(est.value) < 4.0 * std::sqrt(24.0 / 100000.0));
    CHECK(est.variance_estimate.has_value());
}

TEST_CASE("independent blocks annihilate the joint cumulant") {
    const Series x = cubed_series(41, 50000, "x");
    const Series y = cubed_series(42, 50000, "y");
    Dataset d;
    d.columns = {x, y};
    d = center(d);
    const auto est = joint_cumulant(d, {{"x", "x", "y", "y"}});
    const double se = jackknife_se_cum_ab(d.columns[0].values, d.columns[1].values, 2, 2);
    CHECK(std::abs(est.value) < 4.0 * se);
}

TEST_CASE("joint cumulant rejects unsupported orders and short samples") {
    Dataset d;
    d.columns.push_back({{1, 2, 3, 4, 5}, "x"});
    CHECK_THROWS_AS(joint_cumulant(d, {{"x", "x", "x", "x", "x"}}), UnsupportedOrderError);
    CHECK_THROWS_AS(joint_cumulant(d, {{"x"}}), UnsupportedOrderError);
    Dataset tiny;
    tiny.columns.push_back({{1, 2, 3}, "x"});
    CHECK_THROWS_AS(joint_cumulant(tiny, {{"x", "x", "x", "x"}}), SampleSizeError);
}

TEST_CASE("cum_ab agrees with joint_cumulant at order four and with the oracle at orders 5-6") {
    const Series x = cubed_series(51, 400, "x");
    const Series y = cubed_series(52, 400, "y");
    Dataset d;
    d.columns = {x, y};
    d = center(d);
    const Series& cx = d.columns[0];
    const Series& cy = d.columns[1];

    CHECK(cum_ab(cx, cy, 1, 1).value ==
          doctest::Approx(joint_cumulant(d, {{"x", "y"}}).value).epsilon(1e-12));
    CHECK(cum_ab(cx, cy, 2, 2).value ==
          doctest::Approx(joint_cumulant(d, {{"x", "x", "y", "y"}}).value).epsilon(1e-12));

    // brute-force oracle for the polarized orders on tiny samples
    Rng rng(53);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t n = 9 + rng.next_below(3);
        std::vector<double> a(n), b(n);
        for (auto& v : a) v = rng.next_normal();
        for (auto& v : b) v = 0.4 * a[&v - b.data()] + rng.next_normal();
        for (const auto& [p, q] : std::vector<std::pair<int, int>>{{1, 4}, {2, 3}, {3, 3}, {1, 5}}) {
            std::vector<std::span<const double>> cols;
            cols.insert(cols.end(), p, std::span<const double>(a));
            cols.insert(cols.end(), q, std::span<const double>(b));
            const double oracle = testoracle::oracle_cumulant(cols);
            const double mine = cum_ab_value(a, b, p, q);
            CHECK(mine == doctest::Approx(oracle).epsilon(5e-7));
        }
    }
}

TEST_CASE("cum_ab multilinearity: proportional columns factor out exactly") {
    const Series l = cubed_series(61, 3000, "l");
    Series x1{l.values, "x1"}, x2{l.values, "x2"};
    for (auto& v : x1.values) v *= 2.0;
    for (auto& v : x2.values) v *= 3.0;
    Dataset d;
    d.columns = {x1, x2, l};
    d = center(d);

    const double k4 = kstat_uni(d.columns[2].values, 4);
    CHECK(cum_ab(d.columns[0], d.columns[1], 3, 1).value ==
          doctest::Approx(8.0 * 3.0 * k4).epsilon(1e-9));
    const double k5 = kstat_uni(d.columns[2].values, 5);
    CHECK(cum_ab(d.columns[0], d.columns[1], 3, 2).value ==
          doctest::Approx(8.0 * 9.0 * k5).epsilon(1e-6));

    CHECK_THROWS_AS(cum_ab(d.columns[0], d.columns[1], 4, 3), UnsupportedOrderError);
    CHECK_THROWS_AS(cum_ab(d.columns[0], d.columns[1], 0, 2), UnsupportedOrderError);
}

TEST_CASE("appendix variance diagnostic: printed formula, 1/n scaling") {
    // two-point series: all even central sample moments 1, odd 0
    Series pm;
    pm.label = "pm";
    for (int i = 0; i < 50; ++i) {
        pm.values.push_back(1.0);
        pm.values.push_back(-1.0);
    }
    // mu8 - 12 mu6 mu2 - mu4^2 + 48 mu4 mu2^2 - mu2 - 36 mu2^4 = -1 + 12 = ...
    const double expect = (1.0 - 12.0 - 1.0 + 48.0 - 1.0 - 36.0) / 100.0;
    CHECK(cumulant4_variance(pm) == doctest::Approx(expect).epsilon(1e-12));

    // doubling the sample with identical moments halves the value
    Series twice = pm;
    twice.values.insert(twice.values.end(), pm.values.begin(), pm.values.end());
    CHECK(cumulant4_variance(twice) == doctest::Approx(expect / 2.0).epsilon(1e-12));

    // constant series: all central moments vanish
    Series flat;
    flat.label = "flat";
    flat.values.assign(20, 3.14);
    CHECK(cumulant4_variance(flat) == 0.0);

    // standard-Gaussian population moments give 23/n by the printed formula
    // (the classical asymptotic value is 24/n; kept as printed)
    Rng rng(71);
    Series z;
    z.label = "z";
    z.values.resize(400000);
    for (auto& v : z.values) v = rng.next_normal();
    center_in_place(z.values);
    const double v = cumulant4_variance(z) * 400000.0;
    CHECK(v == doctest::Approx(23.0).epsilon(0.30));

    Series tiny;
    tiny.values.assign(8, 1.0);
    CHECK_THROWS_AS(cumulant4_variance(tiny), SampleSizeError);
}
