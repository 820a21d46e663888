#include "hocd/olc.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hocd/cumulants.hpp"
#include "hocd/parallel.hpp"
#include "hocd/rng.hpp"

namespace hocd {

namespace {

std::string strip_residual_mark(const std::string& label) {
    return label.rfind('~', 0) == 0 ? label.substr(1) : label;
}

// Pair estimate with the documented fallback ladder: Theorem-1 orders, then
// the order scan at the full multiplier, then the scan again at the weak
// floor keeping the best self-normalized order.
std::optional<PairCoefficients> estimate_with_fallback(const Series& ref, const Series& v,
                                                       const Config& cfg) {
    try {
        return estimate_pair_general(ref, v, 1, 2, cfg.degeneracy_multiplier);
    } catch (const DegenerateCumulantError&) {
    } catch (const NonEstimableError&) {
    }
    try {
        const auto [n, m] = select_order(ref, v, cfg.degeneracy_multiplier);
        return estimate_pair_general(ref, v, n, m, cfg.degeneracy_multiplier);
    } catch (const DegenerateCumulantError&) {
    } catch (const NonEstimableError&) {
    }

    // weak-floor rescue: best order by the smaller of the two t-statistics
    static constexpr std::array<std::pair<int, int>, 9> kScan{{
        {1, 2}, {2, 1}, {1, 3}, {3, 1}, {2, 2}, {1, 4}, {4, 1}, {2, 3}, {3, 2},
    }};
    std::span<const double> a(ref.values), b(v.values);
    double best_t = cfg.weak_order_floor;
    std::optional<std::pair<int, int>> best;
    for (const auto& [n, m] : kScan) {
        const double den = cum_ab_value(a, b, n, m + 1);
        const double den_se = jackknife_se_cum_ab(a, b, n, m + 1);
        if (den_se <= 0.0) continue;
        const double t_den = std::abs(den) / den_se;
        if (t_den <= best_t) continue;
        const double num = cum_ab_value(a, b, n + 1, m);
        const double num_se = jackknife_se_cum_ab(a, b, n + 1, m);
        if (num_se <= 0.0) continue;
        const double t = std::min(t_den, std::abs(num) / num_se);
        if (t > best_t) {
            best_t = t;
            best = {n, m};
        }
    }
    if (!best) return std::nullopt;
    try {
        return estimate_pair_general(ref, v, best->first, best->second, cfg.weak_order_floor);
    } catch (const DegenerateCumulantError&) {
        return std::nullopt;
    } catch (const NonEstimableError&) {
        return std::nullopt;
    }
}

std::uint64_t hypothesis_seed(const OLCHypothesis& hyp, const Config& cfg) {
    std::string key = "olc|" + hyp.component_kind.display() + "|";
    for (const auto& l : hyp.xi_set) key += l + ",";
    key += "|";
    for (const auto& l : hyp.xj_set) key += l + ",";
    return derive_seed(cfg.seed, key);
}

}  // namespace

const char* HypothesisResult::reason_name(Reason r) {
    switch (r) {
        case Reason::Accepted: return "Accepted";
        case Reason::CumulantDegenerate: return "CumulantDegenerate";
        case Reason::DependentResidual: return "DependentResidual";
        case Reason::NoNullSpace: return "NoNullSpace";
    }
    return "?";
}

HypothesisResult check_olc(const OLCHypothesis& hyp, const Dataset& data, const Config& cfg) {
    if (hyp.xi_set.empty() || hyp.xj_set.size() < 2)
        throw InputShapeError("check_olc: need xi_set nonempty and |xj_set| >= 2");

    const auto resolve = [&](const std::string& label) -> const Series& {
        const auto it = hyp.residualized_inputs.find(label);
        return it != hyp.residualized_inputs.end() ? it->second : data.at(label);
    };

    HypothesisResult res;

    // (1) anchored column estimation: the first pair fixes the reference
    // loading alpha_ref; every other coefficient is cum11 / alpha_ref, so the
    // whole column is consistent up to the single latent normalization and
    // the null-space direction below reduces to covariance ratios
    // the anchor scale comes from the first pair whose fourth-order route is
    // usable; the remaining coefficients are cum11 / alpha_ref (the anchored
    // renormalization collapses to exactly that), so a pair whose higher
    // cumulants are too noisy may still enter through a strong covariance
    const std::string& ref_label = hyp.xi_set.front();
    const Series& ref = data.at(ref_label);
    double alpha_ref = 0.0;
    std::vector<std::optional<PairCoefficients>> pair_est;
    for (const auto& vlabel : hyp.xj_set) {
        const Series& v = resolve(vlabel);
        pair_est.push_back(estimate_with_fallback(ref, v, cfg));
        if (pair_est.back() && alpha_ref == 0.0) {
            alpha_ref = pair_est.back()->alpha_i;
            res.estimated_column[ref_label] = alpha_ref;
        }
    }
    if (alpha_ref == 0.0) {
        res.reason = HypothesisResult::Reason::CumulantDegenerate;
        return res;
    }
    std::vector<double> xj_column;
    for (std::size_t i = 0; i < hyp.xj_set.size(); ++i) {
        const Series& v = resolve(hyp.xj_set[i]);
        const std::string raw = strip_residual_mark(hyp.xj_set[i]);
        std::span<const double> ra(ref.values), rb(v.values);
        const double c11 = pair_est[i] ? pair_est[i]->cum11 : cum_ab_value(ra, rb, 1, 1);
        const double c11_se = jackknife_se_cum_ab(ra, rb, 1, 1);
        // pairwise dependence is the caller's precondition (pre-screened);
        // the covariance route only needs to avoid dividing by pure noise
        if (!pair_est[i] && std::abs(c11) <= std::max(1.0, cfg.weak_order_floor) * c11_se) {
            res.reason = HypothesisResult::Reason::CumulantDegenerate;
            return res;
        }
        const double coef = c11 / alpha_ref;
        res.estimated_column[raw] = coef;
        res.column_se[raw] = c11_se / std::max(1e-12, std::abs(alpha_ref));
        if (!res.column_se.count(ref_label))
            res.column_se[ref_label] = c11_se / std::max(1e-12, std::abs(coef));
        xj_column.push_back(coef);
    }
    for (std::size_t i = 1; i < hyp.xi_set.size(); ++i) {
        const Series& u = data.at(hyp.xi_set[i]);
        const auto pc = estimate_with_fallback(resolve(hyp.xj_set.front()), u, cfg);
        if (!pc) {
            res.reason = HypothesisResult::Reason::CumulantDegenerate;
            return res;
        }
        res.estimated_column[hyp.xi_set[i]] = pc->alpha_j;
    }

    // (2) null weights over the xj rows. The condition is existential in
    // omega, and the estimated column carries sampling error, so for the
    // two-row case the annihilated direction is additionally swept over a
    // +-2 SE bracket of the coefficient ratio; a direction that cancels the
    // hypothesized component exists in the bracket when the hypothesis is
    // true, while a second shared component defeats every direction.
    std::vector<double> ratio_grid{1.0};
    if (xj_column.size() == 2) {
        double rel = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            const std::string raw = strip_residual_mark(hyp.xj_set[i]);
            const double se = res.column_se.count(raw) ? res.column_se.at(raw) : 0.0;
            const double c = std::abs(xj_column[i]);
            if (c > 1e-12) rel += (se / c) * (se / c);
        }
        rel = std::min(0.4, std::sqrt(rel));
        if (rel > 1e-6)
            ratio_grid = {1.0, 1.0 - rel, 1.0 + rel, 1.0 - 2.0 * rel, 1.0 + 2.0 * rel};
    }

    std::vector<Series> xi_block;
    for (const auto& l : hyp.xi_set) xi_block.push_back(data.at(l));
    const std::uint64_t seed = hypothesis_seed(hyp, cfg);

    std::optional<IndependenceResult> best;
    double best_g = 1.0;
    WeightVector best_omega;
    Series best_combo;
    for (const double g : ratio_grid) {
        Eigen::MatrixXd a_sub(static_cast<long>(xj_column.size()), 1);
        for (std::size_t i = 0; i < xj_column.size(); ++i)
            a_sub(static_cast<long>(i), 0) = (i == 0 ? g : 1.0) * xj_column[i];
        WeightVector omega;
        try {
            omega = null_weight(a_sub, hyp.xj_set, std::nullopt, cfg.rank_tolerance);
        } catch (const NoNullSpaceError&) {
            res.reason = HypothesisResult::Reason::NoNullSpace;
            return res;
        }
        Series combo;
        combo.label = "omega^T[xj]";
        combo.values.assign(data.n_samples(), 0.0);
        for (std::size_t i = 0; i < hyp.xj_set.size(); ++i) {
            const Series& v = resolve(hyp.xj_set[i]);
            for (std::size_t r = 0; r < combo.values.size(); ++r)
                combo.values[r] += omega.entries[i] * v.values[r];
        }

        // (3) independence of the weighted combination from the xi block
        const IndependenceResult ind = test_independence(combo, xi_block, cfg.olc_alpha(),
                                                         cfg.n_permutations, seed,
                                                         cfg.subsample_cap);
        if (!best || ind.p_value > best->p_value) {
            best = ind;
            best_g = g;
            best_omega = std::move(omega);
            best_combo = std::move(combo);
        }
        if (best->independent) break;  // center-out scan, first success wins
    }

    // the recorded column keeps the point estimates; the bracket factor only
    // selects the omega direction (a max-p search is a poor coefficient
    // estimator compared to the covariance ratio)
    (void)best_g;
    res.omega = std::move(best_omega);
    res.independence = *best;
    res.residual = std::move(best_combo);
    res.accepted = best->independent;
    res.reason = best->independent ? HypothesisResult::Reason::Accepted
                                   : HypothesisResult::Reason::DependentResidual;
    return res;
}

HypothesisResult identify_confounder(const std::string& xi, const std::string& xj,
                                     const std::string& xk, const ResidualContext& ctx,
                                     const Dataset& data, const Config& cfg) {
    const std::set<std::string> pair{xi, xj};
    const auto shared = ctx.shared_components(xi, xj);
    ResidualOutcome ri = residualize(xi, shared, pair, data, ctx, cfg.rank_tolerance);
    ResidualOutcome rj = residualize(xj, shared, pair, data, ctx, cfg.rank_tolerance);

    OLCHypothesis hyp;
    hyp.xi_set = {xk};
    hyp.xj_set = {ri.series.label, rj.series.label};
    hyp.component_kind = {ComponentDescriptor::Kind::LatentConfounder, ""};
    hyp.residualized_inputs[ri.series.label] = std::move(ri.series);
    hyp.residualized_inputs[rj.series.label] = std::move(rj.series);
    return check_olc(hyp, data, cfg);
}

HypothesisResult determine_order(const std::string& xi, const std::string& xj,
                                 const ResidualContext& ctx, const Dataset& data,
                                 const Config& cfg) {
    const std::set<std::string> pair{xi, xj};
    const auto shared = ctx.shared_components(xi, xj);
    ResidualOutcome ri = residualize(xi, shared, pair, data, ctx, cfg.rank_tolerance);
    ResidualOutcome rj = residualize(xj, shared, pair, data, ctx, cfg.rank_tolerance);

    OLCHypothesis hyp;
    hyp.xi_set = {xi};
    hyp.xj_set = {ri.series.label, rj.series.label};
    hyp.component_kind = {ComponentDescriptor::Kind::ObservedNoise, xi};
    hyp.residualized_inputs[ri.series.label] = std::move(ri.series);
    hyp.residualized_inputs[rj.series.label] = std::move(rj.series);
    return check_olc(hyp, data, cfg);
}

bool prescreen_dependent(const Series& a, const Series& b, double multiplier) {
    std::span<const double> x(a.values), y(b.values);
    static constexpr std::array<std::pair<int, int>, 4> kStats{{{1, 1}, {1, 3}, {3, 1}, {2, 2}}};
    for (const auto& [p, q] : kStats) {
        const double v = cum_ab_value(x, y, p, q);
        const double se = jackknife_se_cum_ab(x, y, p, q);
        if (se > 0.0 && std::abs(v) > multiplier * se) return true;
    }
    return false;
}

namespace {

constexpr std::array<std::pair<int, int>, 4> kGateChannels{{{1, 1}, {1, 3}, {3, 1}, {2, 2}}};

// per-channel studentized contrasts; each channel is compared against its
// own permutation null (the heavy-tailed channels have much wilder nulls
// than the covariance one, so a shared max would drown the signal)
std::array<double, 4> channel_contrasts(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::array<double, 4> out{};
    for (std::size_t c = 0; c < kGateChannels.size(); ++c) {
        const auto [p, q] = kGateChannels[c];
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double t = 1.0;
            for (int k = 0; k < p; ++k) t *= x[r];
            for (int k = 0; k < q; ++k) t *= y[r];
            ss += t * t;
        }
        out[c] = ss > 0.0 ? std::abs(cum_ab_value(x, y, p, q)) * n / std::sqrt(ss) : 0.0;
    }
    return out;
}

}  // namespace

bool permutation_dependent(const Series& a, const Series& b, double alpha, int n_permutations,
                           std::uint64_t seed) {
    if (a.size() != b.size()) throw InputShapeError("permutation_dependent: length mismatch");
    const std::size_t n = a.size();
    std::span<const double> x(a.values), y(b.values);
    const std::array<double, 4> observed = channel_contrasts(x, y);
    std::vector<std::array<int, 4>> exceed(n_permutations);
    parallel_for(static_cast<std::size_t>(n_permutations), [&](std::size_t rep) {
        Rng rng(derive_seed(seed, "gate-perm", rep + 1));
        std::vector<std::uint32_t> pi(n);
        for (std::size_t i = 0; i < n; ++i) pi[i] = static_cast<std::uint32_t>(i);
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(pi[i], pi[rng.next_below(i + 1)]);
        std::vector<double> xperm(n);
        for (std::size_t i = 0; i < n; ++i) xperm[i] = x[pi[i]];
        const auto stats = channel_contrasts(xperm, y);
        for (std::size_t c = 0; c < 4; ++c) exceed[rep][c] = stats[c] >= observed[c] ? 1 : 0;
    });
    // Bonferroni min-p across the four channels
    double min_p = 1.0;
    for (std::size_t c = 0; c < 4; ++c) {
        int count = 0;
        for (int rep = 0; rep < n_permutations; ++rep) count += exceed[rep][c];
        min_p = std::min(min_p, (1.0 + count) / (1.0 + n_permutations));
    }
    return std::min(1.0, 4.0 * min_p) <= alpha;
}

}  // namespace hocd
