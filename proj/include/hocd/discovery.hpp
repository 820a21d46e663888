#ifndef HOCD_DISCOVERY_HPP
#define HOCD_DISCOVERY_HPP

#include "hocd/config.hpp"
#include "hocd/graph.hpp"
#include "hocd/mixing.hpp"
#include "hocd/olc.hpp"
#include "hocd/residual.hpp"
#include "hocd/types.hpp"

namespace hocd {

struct DiscoveryResult {
    CausalGraph graph;
    MixingMatrix mixing;
    ResidualContext context;
    double sweep_seconds = 0.0;  // confounder + order sweep phases only
    double total_seconds = 0.0;
    int rounds_run = 0;
};

/// Full pipeline: complete undirected graph, alternating confounder and
/// order sweeps until a fixed point (or max_rounds), redundant-edge
/// elimination, coefficient recovery. Deterministic given (data, cfg.seed).
DiscoveryResult discover(const Dataset& data, const Config& cfg);

/// One pass of latent-confounder identification over the unresolved pairs.
/// Hypotheses are evaluated against the state at entry and merged in sorted
/// pair order. Returns true when the graph or context changed.
bool confounder_sweep(CausalGraph& graph, ResidualContext& ctx, const Dataset& data,
                      const Config& cfg);

/// One pass of causal-order determination over the still-undirected pairs;
/// also marks pairs whose residualized columns have lost all dependence as
/// non-adjacent. Returns true on change.
bool order_sweep(CausalGraph& graph, ResidualContext& ctx, const Dataset& data, const Config& cfg);

/// Final pass: marks still-undirected pairs non-adjacent when their
/// residualized columns have no remaining dependence in either direction.
void separation_sweep(CausalGraph& graph, const ResidualContext& ctx, const Dataset& data,
                      const Config& cfg);

/// Proposition-1 redundant-edge elimination over the directed edges.
void eliminate_redundant(CausalGraph& graph, const ResidualContext& ctx, const Dataset& data,
                         const Config& cfg);

/// Reads (I-B)^{-1} off the observed-noise block of the mixing matrix over
/// the resolved variables, inverts it, and writes B and Lambda coefficients
/// onto the graph's edges. Throws CoefficientRecoveryError when the noise
/// block is singular.
CausalGraph recover_coefficients(const MixingMatrix& mixing, const CausalGraph& graph);

/// Mixing matrix assembled from the identified components.
MixingMatrix assemble_mixing(const ResidualContext& ctx, const std::vector<std::string>& observed);

}  // namespace hocd

#endif
