#include "hocd/independence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hocd/parallel.hpp"
#include "hocd/rng.hpp"

namespace hocd {

namespace {

// Median of nonzero pairwise absolute differences; 1.0 when the series is
// (numerically) constant.
double median_bandwidth(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> d;
    d.reserve(n * (n - 1) / 2);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const double v = std::abs(x[a] - x[b]);
            if (v > 0.0) d.push_back(v);
        }
    if (d.empty()) return 1.0;
    const std::size_t mid = d.size() / 2;
    std::nth_element(d.begin(), d.begin() + mid, d.end());
    return d[mid];
}

// Accumulates -(x_a - x_b)^2 / (2 sigma^2) into the exponent matrix.
void add_component_exponent(std::vector<double>& expo, const std::vector<double>& x) {
    const std::size_t n = x.size();
    const double sigma = median_bandwidth(x);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    parallel_for(n, [&](std::size_t a) {
        double* row = expo.data() + a * n;
        const double xa = x[a];
        for (std::size_t b = 0; b < n; ++b) {
            const double d = xa - x[b];
            row[b] -= d * d * inv;
        }
    });
}

void exponentiate(std::vector<double>& expo, std::size_t n) {
    parallel_for(n, [&](std::size_t a) {
        double* row = expo.data() + a * n;
        for (std::size_t b = 0; b < n; ++b) row[b] = std::exp(row[b]);
    });
}

// Double-centering: M = H L H with H = I - 11^T/n. L symmetric.
void double_center(std::vector<double>& m, std::size_t n) {
    std::vector<double> rowmean(n, 0.0);
    double grand = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        double s = 0.0;
        const double* row = m.data() + a * n;
        for (std::size_t b = 0; b < n; ++b) s += row[b];
        rowmean[a] = s / static_cast<double>(n);
        grand += s;
    }
    grand /= static_cast<double>(n) * static_cast<double>(n);
    for (std::size_t a = 0; a < n; ++a) {
        double* row = m.data() + a * n;
        for (std::size_t b = 0; b < n; ++b) row[b] += grand - rowmean[a] - rowmean[b];
    }
}

double hsic_of_permutation(const std::vector<double>& k, const std::vector<double>& m,
                           const std::vector<std::uint32_t>& pi, std::size_t n) {
    double total = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        const double* krow = k.data() + static_cast<std::size_t>(pi[a]) * n;
        const double* mrow = m.data() + a * n;
        double s = 0.0;
        for (std::size_t b = 0; b < n; ++b) s += krow[pi[b]] * mrow[b];
        total += s;
    }
    return total / (static_cast<double>(n) * static_cast<double>(n));
}

}  // namespace

IndependenceResult test_independence(const Series& u, const std::vector<Series>& v, double alpha,
                                     int n_permutations, std::uint64_t seed, int subsample_cap) {
    if (v.empty()) throw InputShapeError("test_independence: empty V block");
    const std::size_t full_n = u.size();
    for (const auto& s : v)
        if (s.size() != full_n) throw InputShapeError("test_independence: length mismatch");
    if (full_n < 20) throw SampleSizeError("test_independence: requires N >= 20");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputShapeError("test_independence: alpha not in (0,1)");
    if (n_permutations < 99)
        throw InputShapeError("test_independence: n_permutations must be >= 99");

    // Seeded subsample keeps the quadratic kernel cost bounded.
    std::vector<std::size_t> rows(full_n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    if (subsample_cap > 0 && full_n > static_cast<std::size_t>(subsample_cap)) {
        Rng shuffler(derive_seed(seed, "subsample"));
        for (std::size_t i = full_n - 1; i > 0; --i)
            std::swap(rows[i], rows[shuffler.next_below(i + 1)]);
        rows.resize(static_cast<std::size_t>(subsample_cap));
        std::sort(rows.begin(), rows.end());
    }
    const std::size_t n = rows.size();

    std::vector<double> ucol(n);
    for (std::size_t r = 0; r < n; ++r) ucol[r] = u.values[rows[r]];

    std::vector<double> k(n * n, 0.0);
    add_component_exponent(k, ucol);
    exponentiate(k, n);

    std::vector<double> m(n * n, 0.0);
    std::vector<double> comp(n);
    for (const auto& s : v) {
        for (std::size_t r = 0; r < n; ++r) comp[r] = s.values[rows[r]];
        add_component_exponent(m, comp);
    }
    exponentiate(m, n);
    double_center(m, n);

    std::vector<std::uint32_t> ident(n);
    std::iota(ident.begin(), ident.end(), 0u);
    const double observed = hsic_of_permutation(k, m, ident, n);

    std::vector<double> null_stats(n_permutations);
    parallel_for(static_cast<std::size_t>(n_permutations), [&](std::size_t rep) {
        Rng rng(derive_seed(seed, "perm", rep + 1));
        std::vector<std::uint32_t> pi(n);
        std::iota(pi.begin(), pi.end(), 0u);
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(pi[i], pi[rng.next_below(i + 1)]);
        null_stats[rep] = hsic_of_permutation(k, m, pi, n);
    });

    int exceed = 0;
    for (const double s : null_stats)
        if (s >= observed) ++exceed;

    IndependenceResult res;
    res.statistic = observed;
    res.n_permutations = n_permutations;
    res.alpha = alpha;
    res.p_value = (1.0 + exceed) / (1.0 + n_permutations);
    res.independent = res.p_value > alpha;
    return res;
}

}  // namespace hocd
