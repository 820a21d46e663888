#ifndef HOCD_EVAL_HPP
#define HOCD_EVAL_HPP

#include "hocd/graph.hpp"
#include "hocd/simulate.hpp"

namespace hocd {

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct RelationCounts {
    int truth = 0;
    int found = 0;
    int correct = 0;
};

struct MetricsReport {
    PRF directed;
    PRF nonadjacent;
    RelationCounts directed_counts;
    RelationCounts nonadjacent_counts;
    std::optional<double> rmse;
    // diagnostic only: latent recovery under optimal child-set matching
    int latents_true = 0;
    int latents_found = 0;
    int latents_matched = 0;  // Jaccard >= 2/3
};

/// Directed-edge precision/recall/F1. A learned edge is correct iff the same
/// ordered pair is directed in truth; undirected learned edges count as
/// found-but-incorrect.
PRF edge_metrics(const CausalGraph& learned, const CausalGraph& truth, RelationCounts* counts = nullptr);

/// Non-adjacency metrics over unordered observed pairs; a pair is
/// non-adjacent iff no directed and no undirected edge joins it.
PRF nonadjacency_metrics(const CausalGraph& learned, const CausalGraph& truth,
                         RelationCounts* counts = nullptr);

/// Appendix-style coefficient error sqrt(1/n^2 sum (b - b_hat)^2) over the
/// full observed B matrix; missing learned coefficients count as 0.
double rmse(const CausalGraph& learned, const ModelSpec& truth);

MetricsReport evaluate(const CausalGraph& learned, const ModelSpec& truth);
MetricsReport evaluate_graphs(const CausalGraph& learned, const CausalGraph& truth);

}  // namespace hocd

#endif
