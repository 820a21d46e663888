#ifndef HOCD_GRAPH_HPP
#define HOCD_GRAPH_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hocd {

struct DirectedEdge {
    std::string from;
    std::string to;
    std::optional<double> coefficient;
};

struct LatentEdge {
    std::string latent;
    std::string child;
    std::optional<double> coefficient;
};

/// Mixed graph over observed + latent variables: directed edges among
/// observed variables form a DAG; undirected edges are unresolved pairs;
/// latent edges point from a latent confounder to an observed child.
struct CausalGraph {
    std::vector<std::string> observed;
    std::vector<std::string> latents;
    std::vector<DirectedEdge> directed_edges;
    std::vector<std::pair<std::string, std::string>> undirected_edges;  // each pair sorted
    std::vector<LatentEdge> latent_edges;
    std::vector<std::string> warnings;

    bool has_directed(const std::string& from, const std::string& to) const;
    bool has_undirected(const std::string& a, const std::string& b) const;
    bool adjacent(const std::string& a, const std::string& b) const;

    void add_undirected(const std::string& a, const std::string& b);
    void remove_undirected(const std::string& a, const std::string& b);
    void add_directed(const std::string& from, const std::string& to,
                      std::optional<double> coef = std::nullopt);
    void remove_directed(const std::string& from, const std::string& to);

    /// True when adding from->to would close a directed cycle.
    bool would_create_cycle(const std::string& from, const std::string& to) const;
    bool is_dag() const;

    std::set<std::string> descendants(const std::string& v) const;
    std::set<std::string> ancestors(const std::string& v) const;

    /// Children of a latent id, sorted.
    std::vector<std::string> latent_children(const std::string& latent) const;

    void sort_canonical();
};

}  // namespace hocd

#endif
