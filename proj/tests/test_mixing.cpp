#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hocd/cumulants.hpp"
#include "hocd/independence.hpp"
#include "hocd/mixing.hpp"
#include "hocd/rng.hpp"

using namespace hocd;

namespace {

std::vector<double> cubed_draws(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) {
        const double z = rng.next_normal();
        x = z * z * z / std::sqrt(15.0);
    }
    return v;
}

// unit *sample* variance so the closed forms come out exact
Series unit_var_latent(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    Series s;
    s.label = "l";
    s.values = cubed_draws(rng, n);
    center_in_place(s.values);
    const double sd = std::sqrt(kstat_uni(s.values, 2));
    for (auto& v : s.values) v /= sd;
    return s;
}

Series scaled(const Series& base, double c, const std::string& label) {
    Series out = base;
    out.label = label;
    for (auto& v : out.values) v *= c;
    return out;
}

}  // namespace

TEST_CASE("closed form recovers exact coefficients on pure shared data") {
    const Series l = unit_var_latent(3, 5000);
    const auto pc = estimate_pair(scaled(l, 2.0, "xi"), scaled(l, 3.0, "xj"));
    CHECK(pc.alpha_i == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(pc.alpha_j == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(pc.order_used == std::pair<int, int>{1, 2});

    // identity mixing
    const auto id = estimate_pair(scaled(l, 1.0, "xi"), scaled(l, 1.0, "xj"));
    CHECK(id.alpha_i == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(id.alpha_j == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("product identity alpha_i * alpha_j == cum11") {
    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 4000;
        std::vector<double> l = cubed_draws(rng, n), si = cubed_draws(rng, n),
                            sj = cubed_draws(rng, n);
        Series xi, xj;
        xi.label = "xi";
        xj.label = "xj";
        const double ai = 0.3 + 0.1 * trial, aj = 0.8 - 0.1 * trial;
        for (std::size_t r = 0; r < n; ++r) {
            xi.values.push_back(ai * l[r] + 0.3 * si[r]);
            xj.values.push_back(aj * l[r] + 0.3 * sj[r]);
        }
        center_in_place(xi.values);
        center_in_place(xj.values);
        try {
            const auto pc = estimate_pair(xi, xj);
            CHECK(pc.alpha_i * pc.alpha_j == doctest::Approx(pc.cum11).epsilon(1e-12));
        } catch (const DegenerateCumulantError&) {
            // acceptable at this N; the identity is only claimed for successes
        }
    }
}

TEST_CASE("round trip at scale: shared cubed-Gaussian component, Gaussian noise") {
    Rng rng(77);
    int within = 0, total = 0;
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 200000;
        const double ai = rng.next_uniform(0.2, 0.8), aj = rng.next_uniform(0.2, 0.8);
        std::vector<double> l = cubed_draws(rng, n);
        Series xi, xj;
        xi.label = "xi";
        xj.label = "xj";
        xi.values.resize(n);
        xj.values.resize(n);
        for (std::size_t r = 0; r < n; ++r) {
            xi.values[r] = ai * l[r] + rng.next_normal();
            xj.values[r] = aj * l[r] + rng.next_normal();
        }
        center_in_place(xi.values);
        center_in_place(xj.values);
        const auto pc = estimate_pair(xi, xj);
        ++total;
        if (std::abs(pc.alpha_i - ai) < 0.03 && std::abs(pc.alpha_j - aj) < 0.03) ++within;
    }
    CHECK(within == total);
}

TEST_CASE("general orders specialize and resolve the index convention") {
    const Series l = unit_var_latent(9, 6000);
    const Series xi = scaled(l, 1.0, "xi");
    const Series xj = scaled(l, 2.0, "xj");

    const auto base = estimate_pair(xi, xj);
    const auto spec12 = estimate_pair_general(xi, xj, 1, 2);
    CHECK(spec12.alpha_i == base.alpha_i);  // same code path, bit-identical
    CHECK(spec12.alpha_j == base.alpha_j);
    CHECK(estimate_pair_general(xi, xj, 2, 1).alpha_i == doctest::Approx(1.0).epsilon(1e-6));

    // odd total orders need a skewed component (a symmetric one has zero odd
    // cumulants): standardized Z^2 - 1 has them all
    Rng rng(9);
    Series sk;
    sk.label = "sk";
    sk.values.resize(6000);
    for (auto& v : sk.values) {
        const double z = rng.next_normal();
        v = (z * z - 1.0) / std::sqrt(2.0);
    }
    center_in_place(sk.values);
    const double sd = std::sqrt(kstat_uni(sk.values, 2));
    for (auto& v : sk.values) v /= sd;
    const Series yi = scaled(sk, 1.0, "yi");
    const Series yj = scaled(sk, 2.0, "yj");

    // the ratio C_{n+1,m}/C_{n,m+1} maps the first argument to alpha_i for
    // every order, including the swapped and the polarized fifth-order ones
    for (const auto& [n, m] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {1, 3}, {3, 1}}) {
        const auto pc = estimate_pair_general(yi, yj, n, m);
        CHECK(pc.alpha_i == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(pc.alpha_j == doctest::Approx(2.0).epsilon(1e-6));
    }

    CHECK_THROWS_AS(estimate_pair_general(xi, xj, 3, 3), UnsupportedOrderError);
    CHECK_THROWS_AS(estimate_pair_general(xi, xj, 0, 1), UnsupportedOrderError);
}

TEST_CASE("select_order prefers the fourth-order route and flags gaussian data") {
    const Series l = unit_var_latent(1, 2000);
    CHECK(select_order(l, scaled(l, 1.5, "xj")) == std::pair<int, int>{1, 2});

    // all cumulants of an actual gaussian vanish: nothing is usable
    Rng rng(14);
    Series gi, gj;
    gi.label = "gi";
    gj.label = "gj";
    for (int r = 0; r < 2000; ++r) {
        const double g = rng.next_normal();
        gi.values.push_back(g + 0.5 * rng.next_normal());
        gj.values.push_back(g + 0.5 * rng.next_normal());
    }
    center_in_place(gi.values);
    center_in_place(gj.values);
    CHECK_THROWS_AS(select_order(gi, gj), NonEstimableError);
}

TEST_CASE("select_order reaches total order six for zero-kurtosis symmetric input") {
    // symmetric mixture with vanishing excess kurtosis but nonzero kappa6
    const double w = (11.0 - std::sqrt(57.0)) / 16.0;
    const double a = std::sqrt((1.0 - 2.0 * w) / (1.0 - w));
    Rng rng(15);
    Series x;
    x.label = "x";
    x.values.resize(60000);
    for (auto& v : x.values) {
        if (rng.next_unit() < w)
            v = rng.next_normal() * std::sqrt(2.0);
        else
            v = rng.next_unit() < 0.5 ? a : -a;
    }
    center_in_place(x.values);
    // oracle check of the construction itself
    CHECK(std::abs(kstat_uni(x.values, 4)) < 3.0 * jackknife_se_cum_ab(x.values, x.values, 2, 2));
    CHECK(std::abs(kstat_uni(x.values, 6)) > 1.0);

    Series y = x;
    y.label = "y";
    const auto [n, m] = select_order(x, y);
    CHECK(n + m + 1 == 6);
}

TEST_CASE("null weights annihilate the column, with and without anchor") {
    Eigen::MatrixXd a(2, 1);
    a << 1.0, 2.0;
    const auto w = null_weight(a, {"x1", "x2"}, std::nullopt);
    CHECK(std::abs(w.entries[0] * 1.0 + w.entries[1] * 2.0) < 1e-12);
    CHECK(std::abs(w.entries[0]) + std::abs(w.entries[1]) > 0.5);
    CHECK(w.entries[0] / w.entries[1] == doctest::Approx(-2.0).epsilon(1e-10));

    Eigen::MatrixXd b(2, 1);
    b << 0.5, 0.7;
    const auto wa = null_weight(b, {"x1", "x2"}, std::string("x1"));
    CHECK(wa.entries[0] == 1.0);
    CHECK(wa.entries[1] == doctest::Approx(-5.0 / 7.0).epsilon(1e-12));
    CHECK(wa.normalization_anchor == std::string("x1"));

    // scale invariance of the anchored solution
    const auto wb = null_weight(10.0 * b, {"x1", "x2"}, std::string("x1"));
    CHECK(wb.entries[1] == doctest::Approx(wa.entries[1]).epsilon(1e-12));

    Eigen::MatrixXd sq(2, 2);
    sq << 1, 0, 0, 1;
    CHECK_THROWS_AS(null_weight(sq, {"x1", "x2"}, std::nullopt), NoNullSpaceError);
}

TEST_CASE("surrogate residual cancels the shared component exactly") {
    Rng rng(21);
    const std::size_t n = 3000;
    std::vector<double> l = cubed_draws(rng, n), sj = cubed_draws(rng, n);
    Series xj, xk;
    xj.label = "xj";
    xk.label = "xk";
    xj.values.resize(n);
    xk.values.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        xj.values[r] = l[r] + sj[r];
        xk.values[r] = l[r];
    }
    Eigen::MatrixXd a(2, 1);
    a << 1.0, 1.0;
    const Series resid = surrogate_residual(xj, {xk}, a);
    for (std::size_t r = 0; r < 100; ++r)
        CHECK(resid.values[r] == doctest::Approx(sj[r]).epsilon(1e-12));

    // no surrogates but one component to cancel: nothing can be done
    Eigen::MatrixXd solo(1, 1);
    solo << 1.0;
    CHECK_THROWS_AS(surrogate_residual(xj, {}, solo), NoNullSpaceError);
}

TEST_CASE("residual keeps the anchored variable's other loadings") {
    // x1 = a1 L1 + g1 S1;  x2 = a2 L1 + b2 L2 + z2 S2. Removing L1 from x2
    // via x1 leaves loading -(a2/a1) g1 on S1 and keeps b2, z2.
    Rng rng(22);
    const std::size_t n = 5000;
    const double a1 = 0.6, g1 = 0.9, a2 = 0.5, b2 = 0.7, z2 = 1.1;
    std::vector<double> l1 = cubed_draws(rng, n), l2 = cubed_draws(rng, n),
                        s1 = cubed_draws(rng, n), s2 = cubed_draws(rng, n);
    Series x1, x2;
    x1.label = "x1";
    x2.label = "x2";
    x1.values.resize(n);
    x2.values.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        x1.values[r] = a1 * l1[r] + g1 * s1[r];
        x2.values[r] = a2 * l1[r] + b2 * l2[r] + z2 * s2[r];
    }
    Eigen::MatrixXd a(2, 1);
    a << a2, a1;  // rows {x2, x1}, column L1
    const Series resid = surrogate_residual(x2, {x1}, a);
    for (std::size_t r = 0; r < 50; ++r) {
        const double expect = b2 * l2[r] + z2 * s2[r] - (a2 / a1) * g1 * s1[r];
        CHECK(resid.values[r] == doctest::Approx(expect).epsilon(1e-10));
    }

    // and the residual is independent of the removed component's series
    Series l1s;
    l1s.label = "l1";
    l1s.values = l1;
    const auto ind = test_independence(resid, {l1s}, 0.05, 99, 1234);
    CHECK(ind.independent);
}

TEST_CASE("negative sqrt argument reports non-estimable, never absolute value") {
    // two shared components with opposite-sign kurtosis and mismatched signs
    // push the ratio negative while the covariance stays positive: the
    // hypothesis is false and the estimator must say so
    Rng rng(101);
    const std::size_t n = 50000;
    Series xi, xj;
    xi.label = "xi";
    xj.label = "xj";
    xi.values.resize(n);
    xj.values.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double a = rng.next_uniform(-1.7320508075688772, 1.7320508075688772);
        const double z = rng.next_normal();
        const double b = z * z * z / std::sqrt(15.0);
        xi.values[r] = a + 0.8 * b;
        xj.values[r] = a - 0.3 * b;
    }
    center_in_place(xi.values);
    center_in_place(xj.values);
    try {
        estimate_pair(xi, xj);
        FAIL("expected NonEstimableError");
    } catch (const NonEstimableError& e) {
        CHECK(e.strongly_negative);
    }

    // opposite-sign loadings on one true shared component are fine: the
    // negative sign lands on alpha_j through cum11
    Rng rng2(24);
    Series yi, yj;
    yi.label = "yi";
    yj.label = "yj";
    yi.values.resize(n);
    yj.values.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        const double z = rng2.next_normal();
        const double l = z * z * z / std::sqrt(15.0);
        yi.values[r] = 0.8 * l + 0.2 * rng2.next_normal();
        yj.values[r] = -0.6 * l + 0.2 * rng2.next_normal();
    }
    center_in_place(yi.values);
    center_in_place(yj.values);
    const auto pc = estimate_pair(yi, yj);
    CHECK(pc.alpha_i == doctest::Approx(0.8).epsilon(0.12));
    CHECK(pc.alpha_j == doctest::Approx(-0.6).epsilon(0.12));
}
