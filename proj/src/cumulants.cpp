#include "hocd/cumulants.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace hocd {

namespace {

void require_finite(std::span<const double> v, const char* what) {
    for (const double x : v)
        if (!std::isfinite(x)) throw InputShapeError(std::string(what) + ": non-finite value");
}

double sum1(std::span<const double> a) {
    double s = 0.0;
    for (const double x : a) s += x;
    return s;
}

double sum2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) s += a[r] * b[r];
    return s;
}

double sum3(std::span<const double> a, std::span<const double> b, std::span<const double> c) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) s += a[r] * b[r] * c[r];
    return s;
}

double sum4(std::span<const double> a, std::span<const double> b, std::span<const double> c,
            std::span<const double> d) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) s += a[r] * b[r] * c[r] * d[r];
    return s;
}

}  // namespace

void center_in_place(std::vector<double>& values) {
    if (values.empty()) throw InputShapeError("center: empty column");
    require_finite(values, "center");
    double mean = sum1(values) / static_cast<double>(values.size());
    for (double& v : values) v -= mean;
    // second pass removes the residual rounding drift
    mean = sum1(values) / static_cast<double>(values.size());
    for (double& v : values) v -= mean;
}

Dataset center(const Dataset& data) {
    Dataset out = data;
    for (auto& col : out.columns) center_in_place(col.values);
    return out;
}

// Multivariate k-statistics in raw power sums (Kaplan's formulas). The test
// suite checks them against an independently coded partition-sum oracle.

double kstat2(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    return (n * sum2(a, b) - sum1(a) * sum1(b)) / (n * (n - 1.0));
}

double kstat3(std::span<const double> a, std::span<const double> b, std::span<const double> c) {
    const double n = static_cast<double>(a.size());
    const double s_a = sum1(a), s_b = sum1(b), s_c = sum1(c);
    const double t = n * n * sum3(a, b, c)
                     - n * (s_a * sum2(b, c) + s_b * sum2(a, c) + s_c * sum2(a, b))
                     + 2.0 * s_a * s_b * s_c;
    return t / (n * (n - 1.0) * (n - 2.0));
}

double kstat4(std::span<const double> a, std::span<const double> b, std::span<const double> c,
              std::span<const double> d) {
    const double n = static_cast<double>(a.size());
    const double s_a = sum1(a), s_b = sum1(b), s_c = sum1(c), s_d = sum1(d);
    const double s_ab = sum2(a, b), s_ac = sum2(a, c), s_ad = sum2(a, d);
    const double s_bc = sum2(b, c), s_bd = sum2(b, d), s_cd = sum2(c, d);
    const double s_abc = sum3(a, b, c), s_abd = sum3(a, b, d), s_acd = sum3(a, c, d),
                 s_bcd = sum3(b, c, d);
    const double s_abcd = sum4(a, b, c, d);

    const double t13 = s_a * s_bcd + s_b * s_acd + s_c * s_abd + s_d * s_abc;
    const double t22 = s_ab * s_cd + s_ac * s_bd + s_ad * s_bc;
    const double t211 = s_ab * s_c * s_d + s_ac * s_b * s_d + s_ad * s_b * s_c
                        + s_bc * s_a * s_d + s_bd * s_a * s_c + s_cd * s_a * s_b;
    const double t1111 = s_a * s_b * s_c * s_d;

    const double t = n * n * (n + 1.0) * s_abcd - n * (n + 1.0) * t13 - n * (n - 1.0) * t22
                     + 2.0 * n * t211 - 6.0 * t1111;
    return t / (n * (n - 1.0) * (n - 2.0) * (n - 3.0));
}

double kstat(std::span<const std::span<const double>> cols) {
    switch (cols.size()) {
        case 2: return kstat2(cols[0], cols[1]);
        case 3: return kstat3(cols[0], cols[1], cols[2]);
        case 4: return kstat4(cols[0], cols[1], cols[2], cols[3]);
        default: throw UnsupportedOrderError("kstat: order must be 2, 3 or 4");
    }
}

double kstat_uni(std::span<const double> x, int order) {
    if (order < 2 || order > 6) throw UnsupportedOrderError("kstat_uni: order must be in [2,6]");
    const double n = static_cast<double>(x.size());
    if (x.size() <= static_cast<std::size_t>(order))
        throw SampleSizeError("kstat_uni: need more samples than the order");

    const double mean = sum1(x) / n;
    double s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0;
    for (const double v : x) {
        const double d = v - mean;
        const double d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
        s5 += d2 * d2 * d;
        s6 += d2 * d2 * d2;
    }
    const double n2 = n * n, n3 = n2 * n, n4 = n2 * n2;
    switch (order) {
        case 2: return s2 / (n - 1.0);
        case 3: return n * s3 / ((n - 1.0) * (n - 2.0));
        case 4:
            return ((n2 + n) * s4 - 3.0 * (n - 1.0) * s2 * s2)
                   / ((n - 1.0) * (n - 2.0) * (n - 3.0));
        case 5:
            return ((n3 + 5.0 * n2) * s5 - 10.0 * (n2 - n) * s3 * s2)
                   / ((n - 1.0) * (n - 2.0) * (n - 3.0) * (n - 4.0));
        default:
            return ((n4 + 16.0 * n3 + 11.0 * n2 - 4.0 * n) * s6
                    - 15.0 * (n - 1.0) * (n - 1.0) * (n + 4.0) * s4 * s2
                    - 10.0 * (n3 - 2.0 * n2 + 5.0 * n - 4.0) * s3 * s3
                    + 30.0 * (n2 - 3.0 * n + 2.0) * s2 * s2 * s2)
                   / ((n - 1.0) * (n - 2.0) * (n - 3.0) * (n - 4.0) * (n - 5.0));
    }
}

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// cum(x_i a times, x_j b times) for total order K in {5, 6}: evaluate the
// univariate k_K on K+1 combinations t*x_i + x_j and solve the Vandermonde
// system sum_r binom(K,r) C_{r,K-r} t^r = k_K(t). Each solved coefficient is
// a fixed linear combination of unbiased statistics, hence unbiased itself.
double cum_ab_polarized(std::span<const double> xi, std::span<const double> xj, int a, int b) {
    const int K = a + b;
    const std::size_t N = xi.size();
    Eigen::MatrixXd V(K + 1, K + 1);
    Eigen::VectorXd rhs(K + 1);
    std::vector<double> combo(N);
    for (int q = 0; q <= K; ++q) {
        const double t = static_cast<double>(q) - static_cast<double>(K) / 2.0;
        for (std::size_t r = 0; r < N; ++r) combo[r] = t * xi[r] + xj[r];
        rhs(q) = kstat_uni(combo, K);
        double tp = 1.0;
        for (int r = 0; r <= K; ++r) {
            V(q, r) = binom(K, r) * tp;
            tp *= t;
        }
    }
    const Eigen::VectorXd coef = V.fullPivLu().solve(rhs);
    return coef(a);
}

}  // namespace

double cum_ab_value(std::span<const double> xi, std::span<const double> xj, int a, int b) {
    if (a < 1 || b < 1) throw UnsupportedOrderError("cum_ab: a and b must be >= 1");
    if (a + b > 6)
        throw UnsupportedOrderError("cum_ab: total order a+b must be <= 6");
    if (xi.size() != xj.size()) throw InputShapeError("cum_ab: length mismatch");
    if (xi.size() <= static_cast<std::size_t>(a + b))
        throw SampleSizeError("cum_ab: need more samples than the order");

    const int total = a + b;
    if (total <= 4) {
        std::vector<std::span<const double>> cols;
        cols.insert(cols.end(), a, xi);
        cols.insert(cols.end(), b, xj);
        return kstat(cols);
    }
    return cum_ab_polarized(xi, xj, a, b);
}

CumulantEstimate cum_ab(const Series& xi, const Series& xj, int a, int b) {
    require_finite(xi.values, "cum_ab");
    require_finite(xj.values, "cum_ab");
    CumulantEstimate est;
    est.value = cum_ab_value(xi.values, xj.values, a, b);
    est.order = a + b;
    est.sample_size = xi.size();
    return est;
}

CumulantEstimate joint_cumulant(const Dataset& data, const CumulantIndex& idx) {
    const int order = idx.order();
    if (order < 2 || order > 4)
        throw UnsupportedOrderError(
            "joint_cumulant: order must be in [2,4]; two-variable higher orders go through cum_ab");
    if (data.n_samples() <= static_cast<std::size_t>(order))
        throw SampleSizeError("joint_cumulant: need more samples than the order");

    std::vector<std::span<const double>> cols;
    cols.reserve(idx.variables.size());
    for (const auto& name : idx.variables) {
        const Series& s = data.at(name);
        require_finite(s.values, "joint_cumulant");
        cols.emplace_back(s.values);
    }

    CumulantEstimate est;
    est.value = kstat(cols);
    est.order = order;
    est.sample_size = data.n_samples();

    const bool single = std::all_of(idx.variables.begin(), idx.variables.end(),
                                    [&](const std::string& v) { return v == idx.variables[0]; });
    if (order == 4 && single && data.n_samples() > 8)
        est.variance_estimate = cumulant4_variance(data.at(idx.variables[0]));
    return est;
}

double cumulant4_variance(const Series& x) {
    const std::size_t N = x.size();
    if (N <= 8) throw SampleSizeError("cumulant4_variance: requires N > 8");
    require_finite(x.values, "cumulant4_variance");

    const double n = static_cast<double>(N);
    const double mean = sum1(x.values) / n;
    std::array<double, 9> mu{};  // mu[k] = k-th sample central moment
    for (const double v : x.values) {
        const double d = v - mean;
        double p = d;
        for (int k = 1; k <= 8; ++k) {
            mu[k] += p;
            p *= d;
        }
    }
    for (int k = 1; k <= 8; ++k) mu[k] /= n;

    // Formula as printed, including the bare -mu_2 term; evaluates to 23/n
    // for standard-Gaussian moments although the classical asymptotic value
    // of Var(k4) is 24/n. Kept verbatim as a documented diagnostic.
    const double v = mu[8] - 12.0 * mu[6] * mu[2] - 8.0 * mu[5] * mu[3] - mu[4] * mu[4]
                     + 48.0 * mu[4] * mu[2] * mu[2] + 64.0 * mu[3] * mu[3] - mu[2]
                     - 36.0 * mu[2] * mu[2] * mu[2] * mu[2];
    return v / n;
}

double jackknife_se(std::span<const std::span<const double>> cols, int groups,
                    double (*stat)(std::span<const std::span<const double>>, const void*),
                    const void* ctx) {
    const std::size_t N = cols.empty() ? 0 : cols[0].size();
    if (groups < 2 || N < static_cast<std::size_t>(2 * groups)) return 0.0;

    std::vector<double> estimates(groups);
    std::vector<std::vector<double>> reduced(cols.size());
    std::vector<std::span<const double>> views(cols.size());
    for (int g = 0; g < groups; ++g) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            auto& buf = reduced[c];
            buf.clear();
            buf.reserve(N - N / groups);
            for (std::size_t r = 0; r < N; ++r)
                if (r % static_cast<std::size_t>(groups) != static_cast<std::size_t>(g))
                    buf.push_back(cols[c][r]);
            views[c] = buf;
        }
        estimates[g] = stat(views, ctx);
    }
    double mean = 0.0;
    for (const double e : estimates) mean += e;
    mean /= groups;
    double ss = 0.0;
    for (const double e : estimates) ss += (e - mean) * (e - mean);
    return std::sqrt((static_cast<double>(groups) - 1.0) / groups * ss);
}

double jackknife_se_cum_ab(std::span<const double> xi, std::span<const double> xj, int a, int b,
                           int groups) {
    struct Ctx {
        int a, b;
    } c{a, b};
    const std::array<std::span<const double>, 2> cols{xi, xj};
    return jackknife_se(
        cols, groups,
        [](std::span<const std::span<const double>> v, const void* p) {
            const auto* cc = static_cast<const Ctx*>(p);
            return cum_ab_value(v[0], v[1], cc->a, cc->b);
        },
        &c);
}

}  // namespace hocd
