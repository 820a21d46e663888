#ifndef HOCD_OLC_HPP
#define HOCD_OLC_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hocd/config.hpp"
#include "hocd/independence.hpp"
#include "hocd/mixing.hpp"
#include "hocd/residual.hpp"
#include "hocd/types.hpp"

namespace hocd {

/// Hypothesis that xi_set and xj_set share exactly one independent component.
/// Members of xj_set listed in residualized_inputs are replaced by their
/// surrogate regression residuals; xi_set always uses raw columns.
struct OLCHypothesis {
    std::vector<std::string> xi_set;
    std::vector<std::string> xj_set;
    ComponentDescriptor component_kind;
    std::map<std::string, Series> residualized_inputs;
};

struct HypothesisResult {
    enum class Reason { Accepted, CumulantDegenerate, DependentResidual, NoNullSpace };

    bool accepted = false;
    Reason reason = Reason::CumulantDegenerate;
    std::optional<WeightVector> omega;
    std::map<std::string, double> estimated_column;  // raw-variable labels
    std::map<std::string, double> column_se;
    std::optional<IndependenceResult> independence;
    std::optional<Series> residual;  // omega^T xj_set, for downstream cross-tests

    static const char* reason_name(Reason r);
};

/// Three-step test: (1) estimate the hypothesized component's column by
/// anchored pairwise closed forms, falling back through the order scan when
/// the fourth-order route is degenerate; (2) compute the null weights over
/// the xj rows; (3) test the weighted xj combination against the xi block.
/// All failures are encoded in `reason` (non-positive sqrt arguments count
/// as CumulantDegenerate).
HypothesisResult check_olc(const OLCHypothesis& hyp, const Dataset& data, const Config& cfg);

/// Corollary-1 instantiation: (x_k, {~x_i, ~x_j}) with residuals taken on the
/// components of `ctx` shared by x_i and x_j.
HypothesisResult identify_confounder(const std::string& xi, const std::string& xj,
                                     const std::string& xk, const ResidualContext& ctx,
                                     const Dataset& data, const Config& cfg);

/// Corollary-2 instantiation: (x_i, {~x_i, ~x_j}); acceptance means x_i is
/// causally earlier than x_j.
HypothesisResult determine_order(const std::string& xi, const std::string& xj,
                                 const ResidualContext& ctx, const Dataset& data,
                                 const Config& cfg);

/// Dependence prescreen: true when the covariance or any fourth-order cross
/// cumulant clears `multiplier` jackknife standard errors.
bool prescreen_dependent(const Series& a, const Series& b, double multiplier);

/// Exact-level permutation dependence gate: max self-normalized cross
/// statistic over {C11, C13, C31, C22}, calibrated by permuting one side.
/// O(B * N) -- cheap enough to gate candidate triples.
bool permutation_dependent(const Series& a, const Series& b, double alpha, int n_permutations,
                           std::uint64_t seed);

}  // namespace hocd

#endif
