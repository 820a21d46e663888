#ifndef HOCD_RESIDUAL_HPP
#define HOCD_RESIDUAL_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hocd/mixing.hpp"
#include "hocd/types.hpp"

namespace hocd {

/// One identified independent component with its estimated loadings on the
/// observed variables it is known to reach. Loadings are on the raw-variable
/// scale (the anchored surrogate regression preserves them).
struct IdentifiedComponent {
    ComponentDescriptor id;
    std::map<std::string, double> loadings;
    std::map<std::string, double> loading_se;

    bool knows(const std::string& label) const { return loadings.count(label) > 0; }
    std::vector<std::string> children() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : loadings) out.push_back(k);
        return out;
    }
};

struct ResidualContext {
    std::vector<IdentifiedComponent> components;

    /// Indices of components both labels load on.
    std::vector<std::size_t> shared_components(const std::string& a, const std::string& b) const;

    /// How many identified components a label is a known child of.
    int membership_count(const std::string& label) const;
};

struct ResidualOutcome {
    Series series;                        // the surrogate regression residual
    std::vector<std::string> surrogates;  // observed variables consumed as surrogates
    std::vector<std::size_t> removed;     // context component indices actually removed
};

/// Surrogate regression residual of `target` on the context components named
/// by `component_idx`, excluding `exclude` (the pair under test) from the
/// surrogate pool. Components without an available surrogate are dropped
/// from the removal set. Surrogates are chosen purest-first (fewest
/// component memberships), then lexicographically.
ResidualOutcome residualize(const std::string& target, const std::vector<std::size_t>& component_idx,
                            const std::set<std::string>& exclude, const Dataset& data,
                            const ResidualContext& ctx, double rank_tolerance);

}  // namespace hocd

#endif
