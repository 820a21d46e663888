#ifndef HOCD_CUMULANTS_HPP
#define HOCD_CUMULANTS_HPP

#include <optional>
#include <span>
#include <vector>

#include "hocd/types.hpp"

namespace hocd {

/// Index tuple (i_1, ..., i_k) naming the columns of a joint cumulant.
struct CumulantIndex {
    std::vector<std::string> variables;
    int order() const { return static_cast<int>(variables.size()); }
};

struct CumulantEstimate {
    double value = 0.0;
    int order = 0;
    std::optional<double> variance_estimate;  // single-variable order 4 only
    std::size_t sample_size = 0;
};

/// Subtracts the sample mean from every column. Centering only; variances
/// are left untouched. Constant columns come out exactly zero.
Dataset center(const Dataset& data);

/// Centers a single series in place (two-pass).
void center_in_place(std::vector<double>& values);

/// Unbiased multivariate k-statistic of the joint cumulant named by `idx`,
/// orders 2-4. Symmetric in the index tuple; order 2 is the unbiased sample
/// covariance.
CumulantEstimate joint_cumulant(const Dataset& data, const CumulantIndex& idx);

/// Generalized two-variable cumulant cum(x_i ... a times, x_j ... b times),
/// a+b <= 6. Identical to joint_cumulant for a+b <= 4; orders 5 and 6 are
/// recovered from univariate k-statistics of linear combinations t*x_i + x_j
/// (multilinearity makes the combination exactly unbiased as well).
CumulantEstimate cum_ab(const Series& xi, const Series& xj, int a, int b);

/// Estimator-variance diagnostic for the single-variable fourth cumulant,
/// evaluated with sample central moments mu_2..mu_8 over n. Diagnostic only.
double cumulant4_variance(const Series& x);

// Span-level kernels used by the estimators (inputs assumed centered; the
// k-statistics themselves are translation invariant for order >= 2).
double kstat(std::span<const std::span<const double>> cols);
double kstat2(std::span<const double> a, std::span<const double> b);
double kstat3(std::span<const double> a, std::span<const double> b, std::span<const double> c);
double kstat4(std::span<const double> a, std::span<const double> b, std::span<const double> c,
              std::span<const double> d);

/// Univariate k-statistics k_2..k_6 from central power sums.
double kstat_uni(std::span<const double> x, int order);

/// cum_ab on raw spans; returns just the value.
double cum_ab_value(std::span<const double> xi, std::span<const double> xj, int a, int b);

/// Grouped (delete-d) jackknife standard error with d = N/groups: recomputes
/// `stat` on every leave-one-group-out subsample over the given columns.
/// `stat` receives the reduced columns in the original order.
double jackknife_se(std::span<const std::span<const double>> cols, int groups,
                    double (*stat)(std::span<const std::span<const double>>, const void*),
                    const void* ctx);

/// Convenience wrapper: jackknife SE of cum_ab(a, b).
double jackknife_se_cum_ab(std::span<const double> xi, std::span<const double> xj, int a, int b,
                           int groups = 20);

}  // namespace hocd

#endif
