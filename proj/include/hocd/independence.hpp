#ifndef HOCD_INDEPENDENCE_HPP
#define HOCD_INDEPENDENCE_HPP

#include <cstdint>
#include <vector>

#include "hocd/types.hpp"

namespace hocd {

struct IndependenceResult {
    double statistic = 0.0;    // HSIC (biased V-statistic)
    double p_value = 1.0;      // permutation p-value (1 + #{perm >= obs}) / (1 + B)
    bool independent = true;   // p_value > alpha
    int n_permutations = 0;
    double alpha = 0.05;
};

/// Kernel dependence test between a scalar series u and a (possibly
/// multivariate) block V: Gaussian kernels with median-heuristic bandwidth,
/// product kernel across V's components, calibrated by permuting u with a
/// seeded shuffle. Deterministic given the seed and independent of thread
/// count; N > subsample_cap uses a seeded subsample.
IndependenceResult test_independence(const Series& u, const std::vector<Series>& v, double alpha,
                                     int n_permutations, std::uint64_t seed,
                                     int subsample_cap = 2000);

}  // namespace hocd

#endif
