// Test-only oracle: the joint-cumulant partition sum with each product of
// population moments replaced by its distinct-index symmetric mean. Being
// symmetric and unbiased, the result coincides with the k-statistic by
// uniqueness, giving an independent route to the same number. Brute force
// over distinct sample tuples; use only for small N.
#ifndef HOCD_TESTS_ORACLE_CUMULANTS_HPP
#define HOCD_TESTS_ORACLE_CUMULANTS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace hocd::testoracle {

inline void partitions_rec(std::vector<std::vector<int>>& current, int next, int k,
                           std::vector<std::vector<std::vector<int>>>& out) {
    if (next == k) {
        out.push_back(current);
        return;
    }
    for (std::size_t b = 0; b < current.size(); ++b) {
        current[b].push_back(next);
        partitions_rec(current, next + 1, k, out);
        current[b].pop_back();
    }
    current.push_back({next});
    partitions_rec(current, next + 1, k, out);
    current.pop_back();
}

inline std::vector<std::vector<std::vector<int>>> set_partitions(int k) {
    std::vector<std::vector<std::vector<int>>> out;
    std::vector<std::vector<int>> cur;
    partitions_rec(cur, 0, k, out);
    return out;
}

// symmetric mean over distinct index tuples of prod_b prod_{i in B_b} x_i
inline void distinct_mean_rec(const std::vector<std::vector<double>>& blockprod, std::size_t n,
                              std::vector<std::size_t>& tuple, std::size_t depth, double acc,
                              double& total, double& count) {
    if (depth == blockprod.size()) {
        total += acc;
        count += 1.0;
        return;
    }
    for (std::size_t r = 0; r < n; ++r) {
        bool distinct = true;
        for (std::size_t q = 0; q < depth; ++q)
            if (tuple[q] == r) distinct = false;
        if (!distinct) continue;
        tuple[depth] = r;
        distinct_mean_rec(blockprod, n, tuple, depth + 1, acc * blockprod[depth][r], total, count);
    }
}

inline double distinct_mean(std::span<const std::span<const double>> cols,
                            const std::vector<std::vector<int>>& blocks) {
    const std::size_t n = cols[0].size();
    const std::size_t m = blocks.size();
    std::vector<std::vector<double>> blockprod(m, std::vector<double>(n));
    for (std::size_t b = 0; b < m; ++b)
        for (std::size_t r = 0; r < n; ++r) {
            double p = 1.0;
            for (const int slot : blocks[b]) p *= cols[slot][r];
            blockprod[b][r] = p;
        }
    double total = 0.0, count = 0.0;
    std::vector<std::size_t> tuple(m, 0);
    distinct_mean_rec(blockprod, n, tuple, 0, 1.0, total, count);
    return total / count;
}

inline double oracle_cumulant(std::span<const std::span<const double>> cols) {
    const int k = static_cast<int>(cols.size());
    double est = 0.0;
    for (const auto& partition : set_partitions(k)) {
        const int h = static_cast<int>(partition.size());
        double fact = 1.0;
        for (int i = 2; i < h; ++i) fact *= i;  // (h-1)!
        const double sign = (h % 2 == 1) ? 1.0 : -1.0;
        est += sign * fact * distinct_mean(cols, partition);
    }
    return est;
}

}  // namespace hocd::testoracle

#endif
