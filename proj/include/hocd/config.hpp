#ifndef HOCD_CONFIG_HPP
#define HOCD_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <optional>

namespace hocd {

struct Config {
    double alpha = 0.05;
    int n_permutations = 199;
    double degeneracy_multiplier = 3.0;
    std::uint64_t seed = 0;
    int max_rounds = 0;  // 0: one round per observed variable
    std::optional<int> bonferroni;
    int subsample_cap = 2000;
    double rank_tolerance = 1e-8;
    // Floor for the fallback order scan when nothing clears the full
    // degeneracy multiplier; see select_order's "defaults to (1,2)" contract.
    double weak_order_floor = 1.0;
    // A hypothesis is rejected only when every bracketed omega direction is
    // falsified at alpha / this divisor; keeps estimation-induced residual
    // contamination from vetoing true structures while the permutation
    // floor (1/(1+B)) still rejects genuine dependence outright.
    double olc_rejection_divisor = 5.0;

    double effective_alpha() const {
        return bonferroni && *bonferroni > 1 ? alpha / *bonferroni : alpha;
    }

    double olc_alpha() const { return effective_alpha() / std::max(1.0, olc_rejection_divisor); }
};

}  // namespace hocd

#endif
