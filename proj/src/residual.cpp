#include "hocd/residual.hpp"

#include <algorithm>

namespace hocd {

std::vector<std::size_t> ResidualContext::shared_components(const std::string& a,
                                                            const std::string& b) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < components.size(); ++i)
        if (components[i].knows(a) && components[i].knows(b)) out.push_back(i);
    return out;
}

int ResidualContext::membership_count(const std::string& label) const {
    int n = 0;
    for (const auto& c : components) n += c.knows(label) ? 1 : 0;
    return n;
}

ResidualOutcome residualize(const std::string& target, const std::vector<std::size_t>& component_idx,
                            const std::set<std::string>& exclude, const Dataset& data,
                            const ResidualContext& ctx, double rank_tolerance) {
    ResidualOutcome out;
    const Series& target_series = data.at(target);

    // Pick one surrogate per component, purest first, then close over the
    // components the chosen surrogates themselves load on: an impure
    // surrogate would otherwise leak its other components into the residual.
    std::vector<std::size_t> removal(component_idx.begin(), component_idx.end());
    std::vector<std::string> surrogates;
    std::size_t next = 0;
    while (next < removal.size()) {
        const auto& comp = ctx.components[removal[next]];
        ++next;
        std::vector<std::string> pool;
        for (const auto& child : comp.children()) {
            if (child == target || exclude.count(child)) continue;
            if (std::find(surrogates.begin(), surrogates.end(), child) != surrogates.end())
                continue;
            pool.push_back(child);
        }
        std::sort(pool.begin(), pool.end(), [&](const std::string& x, const std::string& y) {
            const int mx = ctx.membership_count(x), my = ctx.membership_count(y);
            return mx != my ? mx < my : x < y;
        });
        if (!pool.empty()) surrogates.push_back(pool.front());
        // closure: components the surrogate set loads on join the removal set
        for (std::size_t ci = 0; ci < ctx.components.size(); ++ci) {
            if (std::find(removal.begin(), removal.end(), ci) != removal.end()) continue;
            for (const auto& s : surrogates)
                if (ctx.components[ci].knows(s)) {
                    removal.push_back(ci);
                    break;
                }
        }
    }
    // keep only components that some row actually loads on
    for (const std::size_t ci : removal) {
        const auto& comp = ctx.components[ci];
        bool loaded = comp.knows(target);
        for (const auto& s : surrogates) loaded = loaded || comp.knows(s);
        if (loaded) out.removed.push_back(ci);
    }

    if (out.removed.empty() || surrogates.empty()) {
        out.series = target_series;
        out.series.label = target;
        out.removed.clear();
        return out;
    }

    Eigen::MatrixXd a_sub(1 + surrogates.size(), out.removed.size());
    std::vector<Series> xk;
    for (std::size_t c = 0; c < out.removed.size(); ++c) {
        const auto& comp = ctx.components[out.removed[c]];
        const auto loading_of = [&](const std::string& label) {
            const auto it = comp.loadings.find(label);
            return it == comp.loadings.end() ? 0.0 : it->second;
        };
        a_sub(0, c) = loading_of(target);
        for (std::size_t s = 0; s < surrogates.size(); ++s)
            a_sub(1 + s, c) = loading_of(surrogates[s]);
    }
    for (const auto& s : surrogates) xk.push_back(data.at(s));

    try {
        out.series = surrogate_residual(target_series, xk, a_sub, rank_tolerance);
    } catch (const NoNullSpaceError&) {
        out.series = target_series;
        out.series.label = target;
        out.removed.clear();
        out.surrogates.clear();
        return out;
    }
    out.series.label = "~" + target;
    out.surrogates = surrogates;
    return out;
}

}  // namespace hocd
