#ifndef HOCD_MIXING_HPP
#define HOCD_MIXING_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hocd/types.hpp"

namespace hocd {

/// Closed-form estimate of the two mixing coefficients of one shared
/// component. alpha_i * alpha_j == cum11 holds by construction.
struct PairCoefficients {
    double alpha_i = 0.0;
    double alpha_j = 0.0;
    std::pair<int, int> order_used{1, 2};
    double cum11 = 0.0;
    struct Diagnostics {
        double numerator = 0.0;    // C_{n+1,m}
        double denominator = 0.0;  // C_{n,m+1}
        double sqrt_arg = 0.0;
        double denominator_se = 0.0;
        double sqrt_arg_se = 0.0;
    } diagnostics;
};

/// Identity of one independent component: a latent confounder or the
/// exogenous noise of a named observed variable.
struct ComponentDescriptor {
    enum class Kind { LatentConfounder, ObservedNoise } kind = Kind::LatentConfounder;
    std::string name;  // latent id, or the owning observed label

    bool operator==(const ComponentDescriptor&) const = default;
    std::string display() const {
        return kind == Kind::LatentConfounder ? name : "S(" + name + ")";
    }
};

/// Estimated mixing coefficients: rows = observed variables, columns =
/// independent components.
struct MixingMatrix {
    std::vector<std::string> rows;
    std::vector<ComponentDescriptor> columns;
    Eigen::MatrixXd entries;                       // rows.size() x columns.size()
    std::vector<std::vector<bool>> estimated_mask; // same shape

    int row_index(const std::string& label) const;
    int column_index(const ComponentDescriptor& c) const;
};

/// Weights annihilating a column block of the mixing matrix; entries align
/// with `labels`. When anchored, the anchor entry is exactly 1.
struct WeightVector {
    std::vector<double> entries;
    std::vector<std::string> labels;
    std::optional<std::string> normalization_anchor;
};

/// Theorem-1 closed form on the 2nd and 4th order cumulants.
/// degeneracy_multiplier gates |C_{1,3}| against its jackknife SE.
PairCoefficients estimate_pair(const Series& xi, const Series& xj,
                               double degeneracy_multiplier = 3.0);

/// Generalized-order closed form: alpha_i = sqrt((C_{n+1,m}/C_{n,m+1})*C_{1,1}).
/// (n,m) = (1,2) reproduces estimate_pair exactly.
PairCoefficients estimate_pair_general(const Series& xi, const Series& xj, int n, int m,
                                       double degeneracy_multiplier = 3.0);

/// Smallest-total-order (n,m) whose two required cumulants clear
/// `multiplier` jackknife standard errors; scans total orders 4, 5, 6.
std::pair<int, int> select_order(const Series& xi, const Series& xj, double multiplier = 3.0);

/// Left null weights of A_sub (omega^T A_sub = 0). Anchored solution when the
/// anchor row supports one, unanchored unit-norm otherwise.
WeightVector null_weight(const Eigen::MatrixXd& a_sub, const std::vector<std::string>& row_labels,
                         const std::optional<std::string>& anchor, double rank_tolerance = 1e-8);

/// Surrogate regression residual omega^T [x_j, X_k] with omega annihilating
/// the shared-component columns, anchored at x_j so the residual keeps x_j's
/// loadings on everything not removed.
Series surrogate_residual(const Series& xj, const std::vector<Series>& xk,
                          const Eigen::MatrixXd& a_sub, double rank_tolerance = 1e-8);

}  // namespace hocd

#endif
