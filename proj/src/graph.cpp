#include "hocd/graph.hpp"

#include <algorithm>
#include <functional>

namespace hocd {

namespace {
std::pair<std::string, std::string> sorted_pair(const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}
}  // namespace

bool CausalGraph::has_directed(const std::string& from, const std::string& to) const {
    return std::any_of(directed_edges.begin(), directed_edges.end(),
                       [&](const DirectedEdge& e) { return e.from == from && e.to == to; });
}

bool CausalGraph::has_undirected(const std::string& a, const std::string& b) const {
    const auto p = sorted_pair(a, b);
    return std::find(undirected_edges.begin(), undirected_edges.end(), p) != undirected_edges.end();
}

bool CausalGraph::adjacent(const std::string& a, const std::string& b) const {
    return has_undirected(a, b) || has_directed(a, b) || has_directed(b, a);
}

void CausalGraph::add_undirected(const std::string& a, const std::string& b) {
    if (!has_undirected(a, b)) undirected_edges.push_back(sorted_pair(a, b));
}

void CausalGraph::remove_undirected(const std::string& a, const std::string& b) {
    const auto p = sorted_pair(a, b);
    std::erase(undirected_edges, p);
}

void CausalGraph::add_directed(const std::string& from, const std::string& to,
                               std::optional<double> coef) {
    if (!has_directed(from, to)) directed_edges.push_back({from, to, coef});
}

void CausalGraph::remove_directed(const std::string& from, const std::string& to) {
    std::erase_if(directed_edges,
                  [&](const DirectedEdge& e) { return e.from == from && e.to == to; });
}

std::set<std::string> CausalGraph::descendants(const std::string& v) const {
    std::set<std::string> seen;
    std::function<void(const std::string&)> walk = [&](const std::string& cur) {
        for (const auto& e : directed_edges)
            if (e.from == cur && seen.insert(e.to).second) walk(e.to);
    };
    walk(v);
    return seen;
}

std::set<std::string> CausalGraph::ancestors(const std::string& v) const {
    std::set<std::string> seen;
    std::function<void(const std::string&)> walk = [&](const std::string& cur) {
        for (const auto& e : directed_edges)
            if (e.to == cur && seen.insert(e.from).second) walk(e.from);
    };
    walk(v);
    return seen;
}

bool CausalGraph::would_create_cycle(const std::string& from, const std::string& to) const {
    if (from == to) return true;
    const auto desc = descendants(to);
    return desc.count(from) > 0;
}

bool CausalGraph::is_dag() const {
    for (const auto& e : directed_edges) {
        const auto desc = descendants(e.to);
        if (desc.count(e.from)) return false;
    }
    return true;
}

std::vector<std::string> CausalGraph::latent_children(const std::string& latent) const {
    std::vector<std::string> out;
    for (const auto& e : latent_edges)
        if (e.latent == latent) out.push_back(e.child);
    std::sort(out.begin(), out.end());
    return out;
}

void CausalGraph::sort_canonical() {
    std::sort(observed.begin(), observed.end());
    std::sort(latents.begin(), latents.end());
    std::sort(directed_edges.begin(), directed_edges.end(), [](const auto& a, const auto& b) {
        return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });
    std::sort(undirected_edges.begin(), undirected_edges.end());
    std::sort(latent_edges.begin(), latent_edges.end(), [](const auto& a, const auto& b) {
        return std::tie(a.latent, a.child) < std::tie(b.latent, b.child);
    });
    std::sort(warnings.begin(), warnings.end());
}

}  // namespace hocd
