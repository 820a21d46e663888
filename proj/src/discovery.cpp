#include "hocd/discovery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "hocd/cumulants.hpp"
#include "hocd/rng.hpp"

namespace hocd {

namespace {

std::vector<std::pair<std::string, std::string>> unresolved_pairs(const CausalGraph& g) {
    auto pairs = g.undirected_edges;  // already sorted pairs
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

std::string next_latent_name(const ResidualContext& ctx) {
    int n = 0;
    for (const auto& c : ctx.components)
        if (c.id.kind == ComponentDescriptor::Kind::LatentConfounder) ++n;
    return "L" + std::to_string(n + 1);
}

struct ConfounderProposal {
    std::string a, b, anchor;
    std::map<std::string, double> loadings;
    std::map<std::string, double> loading_se;
    Series residual;
};

// Merge rule: a proposal names an existing latent iff they share a child,
// every shared child's loadings agree within 2x the combined jackknife SE,
// and, when a clean witness exists (a pure child of the candidate latent
// outside the proposal), the proposal's omega-residual tests independent of
// it. A residual of a genuinely different latent still carries the old one,
// which the witness detects.
bool merge_matches(const IdentifiedComponent& latent, const ConfounderProposal& prop,
                   const ResidualContext& ctx, const Dataset& data, const Config& cfg) {
    int shared = 0;
    for (const auto& [child, load] : prop.loadings) {
        const auto it = latent.loadings.find(child);
        if (it == latent.loadings.end()) continue;
        ++shared;
        const double se_old = latent.loading_se.count(child) ? latent.loading_se.at(child) : 0.0;
        const double se_new = prop.loading_se.count(child) ? prop.loading_se.at(child) : 0.0;
        const double tol = 2.0 * std::sqrt(se_old * se_old + se_new * se_new);
        if (std::abs(std::abs(it->second) - std::abs(load)) > std::max(tol, 1e-9)) return false;
    }
    if (shared == 0) return false;

    std::string witness;
    for (const auto& [child, load] : latent.loadings) {
        if (prop.loadings.count(child)) continue;
        if (ctx.membership_count(child) != 1) continue;
        witness = child;
        break;
    }
    if (witness.empty()) return true;
    const IndependenceResult ind =
        test_independence(prop.residual, {data.at(witness)}, cfg.effective_alpha(),
                          cfg.n_permutations,
                          derive_seed(cfg.seed, "merge|" + prop.a + "|" + prop.b + "|" + witness),
                          cfg.subsample_cap);
    return ind.independent;
}

}  // namespace

bool confounder_sweep(CausalGraph& graph, ResidualContext& ctx, const Dataset& data,
                      const Config& cfg) {
    const auto pairs = unresolved_pairs(graph);
    const ResidualContext frozen = ctx;

    std::vector<ConfounderProposal> proposals;
    for (const auto& [a, b] : pairs) {
        const std::set<std::string> pair{a, b};
        const auto shared = frozen.shared_components(a, b);
        ResidualOutcome ra = residualize(a, shared, pair, data, frozen, cfg.rank_tolerance);
        ResidualOutcome rb = residualize(b, shared, pair, data, frozen, cfg.rank_tolerance);

        std::set<std::string> banned(ra.surrogates.begin(), ra.surrogates.end());
        banned.insert(rb.surrogates.begin(), rb.surrogates.end());

        for (const auto& klabel : graph.observed) {
            if (klabel == a || klabel == b || banned.count(klabel)) continue;
            const Series& k = data.at(klabel);
            // Corollary 1 needs {k, a, b} pairwise dependent through a still
            // unidentified component, so the gate runs on the candidate's own
            // residual too: leakage from imperfectly removed components would
            // otherwise let a fully-explained candidate found a ghost latent
            std::vector<std::size_t> k_comps;
            for (std::size_t ci = 0; ci < frozen.components.size(); ++ci)
                if (frozen.components[ci].knows(klabel)) k_comps.push_back(ci);
            const ResidualOutcome rk =
                residualize(klabel, k_comps, pair, data, frozen, cfg.rank_tolerance);
            const auto gate_seed = [&](const std::string& other) {
                return derive_seed(cfg.seed, "gate|" + klabel + "|" + other);
            };
            if (!permutation_dependent(rk.series, ra.series, 0.25, 99, gate_seed(a)) ||
                !permutation_dependent(rk.series, rb.series, 0.25, 99, gate_seed(b)))
                continue;

            OLCHypothesis hyp;
            hyp.xi_set = {klabel};
            hyp.xj_set = {ra.series.label, rb.series.label};
            hyp.component_kind = {ComponentDescriptor::Kind::LatentConfounder, ""};
            hyp.residualized_inputs[ra.series.label] = ra.series;
            hyp.residualized_inputs[rb.series.label] = rb.series;
            HypothesisResult res = check_olc(hyp, data, cfg);
            if (!res.accepted) continue;

            // every child of the new latent must load on it detectably; a
            // noise-level loading means the triple is not pairwise dependent
            // through one component (fully-zero columns are forbidden)
            bool loads_ok = true;
            for (const auto& [child, load] : res.estimated_column) {
                const double se = res.column_se.count(child) ? res.column_se.at(child) : 0.0;
                if (std::abs(load) <= 2.0 * se) loads_ok = false;
            }
            if (!loads_ok) continue;

            ConfounderProposal prop;
            prop.a = a;
            prop.b = b;
            prop.anchor = klabel;
            prop.loadings = res.estimated_column;
            prop.loading_se = res.column_se;
            prop.residual = std::move(*res.residual);
            proposals.push_back(std::move(prop));
            break;  // first accepting candidate wins for this pair
        }
    }

    bool changed = false;
    for (const auto& prop : proposals) {
        IdentifiedComponent* target = nullptr;
        for (auto& comp : ctx.components) {
            if (comp.id.kind != ComponentDescriptor::Kind::LatentConfounder) continue;
            if (merge_matches(comp, prop, ctx, data, cfg)) {
                target = &comp;
                break;
            }
        }
        if (!target) {
            IdentifiedComponent fresh;
            fresh.id = {ComponentDescriptor::Kind::LatentConfounder, next_latent_name(ctx)};
            ctx.components.push_back(fresh);
            target = &ctx.components.back();
            graph.latents.push_back(target->id.name);
        }
        for (const auto& [child, load] : prop.loadings) {
            const double se = prop.loading_se.count(child) ? prop.loading_se.at(child) : 0.0;
            if (!target->loadings.count(child)) {
                target->loadings[child] = load;
                target->loading_se[child] = se;
                changed = true;
            } else {
                // precision-weighted pooling of repeated estimates
                const double old_se = target->loading_se[child];
                if (se > 0.0 && old_se > 0.0) {
                    const double w_new = 1.0 / (se * se), w_old = 1.0 / (old_se * old_se);
                    target->loadings[child] =
                        (w_old * target->loadings[child] + w_new * load) / (w_old + w_new);
                    target->loading_se[child] = std::sqrt(1.0 / (w_old + w_new));
                }
            }
        }
        // Corollary 1: no directed path between the anchor and the pair
        if (graph.has_undirected(prop.anchor, prop.a)) {
            graph.remove_undirected(prop.anchor, prop.a);
            changed = true;
        }
        if (graph.has_undirected(prop.anchor, prop.b)) {
            graph.remove_undirected(prop.anchor, prop.b);
            changed = true;
        }
    }
    return changed;
}

bool order_sweep(CausalGraph& graph, ResidualContext& ctx, const Dataset& data, const Config& cfg) {
    const auto pairs = unresolved_pairs(graph);
    const ResidualContext frozen = ctx;

    struct OrderProposal {
        std::string from, to;
        double alpha_from = 0.0, alpha_to = 0.0;
        double se_from = 0.0, se_to = 0.0;
        bool weak = false;
    };
    std::vector<OrderProposal> orders;

    for (const auto& [a, b] : pairs) {
        const std::set<std::string> pair{a, b};
        const auto shared = frozen.shared_components(a, b);
        ResidualOutcome ra = residualize(a, shared, pair, data, frozen, cfg.rank_tolerance);
        ResidualOutcome rb = residualize(b, shared, pair, data, frozen, cfg.rank_tolerance);

        HypothesisResult fwd = determine_order(a, b, frozen, data, cfg);
        HypothesisResult bwd = determine_order(b, a, frozen, data, cfg);
        if (!fwd.accepted && !bwd.accepted) continue;

        // the orientation's noise column must load detectably on both ends,
        // otherwise an accidentally-edged independent pair sails through on
        // trivial independence
        const auto loads_detectably = [](const HypothesisResult& r) {
            for (const auto& [child, load] : r.estimated_column) {
                const double se = r.column_se.count(child) ? r.column_se.at(child) : 0.0;
                if (std::abs(load) <= 2.0 * se) return false;
            }
            return true;
        };
        if (fwd.accepted && !loads_detectably(fwd)) fwd.accepted = false;
        if (bwd.accepted && !loads_detectably(bwd)) bwd.accepted = false;
        if (!fwd.accepted && !bwd.accepted) continue;

        bool use_fwd = fwd.accepted;
        bool weak = false;
        if (fwd.accepted && bwd.accepted) {
            // finite-sample ties resolve toward the larger independence p-value
            use_fwd = fwd.independence->p_value >= bwd.independence->p_value;
            weak = true;
        }
        const HypothesisResult& win = use_fwd ? fwd : bwd;
        OrderProposal prop;
        prop.from = use_fwd ? a : b;
        prop.to = use_fwd ? b : a;
        prop.weak = weak;
        prop.alpha_from = win.estimated_column.count(prop.from)
                              ? win.estimated_column.at(prop.from)
                              : 1.0;
        prop.alpha_to = win.estimated_column.count(prop.to) ? win.estimated_column.at(prop.to) : 0.0;
        prop.se_from = win.column_se.count(prop.from) ? win.column_se.at(prop.from) : 0.0;
        prop.se_to = win.column_se.count(prop.to) ? win.column_se.at(prop.to) : 0.0;
        orders.push_back(std::move(prop));
    }

    bool changed = false;
    for (const auto& prop : orders) {
        if (graph.would_create_cycle(prop.from, prop.to)) continue;
        graph.remove_undirected(prop.from, prop.to);
        graph.add_directed(prop.from, prop.to);
        if (prop.weak)
            graph.warnings.push_back("weakly oriented: " + prop.from + "->" + prop.to +
                                     " (both directions passed; larger p-value kept)");
        ComponentDescriptor id{ComponentDescriptor::Kind::ObservedNoise, prop.from};
        IdentifiedComponent* comp = nullptr;
        for (auto& c : ctx.components)
            if (c.id == id) comp = &c;
        if (!comp) {
            IdentifiedComponent fresh;
            fresh.id = id;
            ctx.components.push_back(fresh);
            comp = &ctx.components.back();
        }
        if (!comp->loadings.count(prop.from)) {
            comp->loadings[prop.from] = prop.alpha_from;
            comp->loading_se[prop.from] = prop.se_from;
        }
        if (!comp->loadings.count(prop.to)) {
            comp->loadings[prop.to] = prop.alpha_to;
            comp->loading_se[prop.to] = prop.se_to;
        }
        changed = true;
    }
    return changed;
}

// Final pass once no sweep makes progress: a still-undirected pair whose
// residualized columns carry no detectable dependence on the other member in
// either direction has all of its dependence explained by the identified
// components and is non-adjacent. Running this only after the fixed point
// keeps early rounds from stealing pairs that later rounds would explain
// through another latent.
void separation_sweep(CausalGraph& graph, const ResidualContext& ctx, const Dataset& data,
                      const Config& cfg) {
    const auto pairs = unresolved_pairs(graph);
    for (const auto& [a, b] : pairs) {
        const std::set<std::string> pair{a, b};
        const auto shared = ctx.shared_components(a, b);
        const ResidualOutcome ra = residualize(a, shared, pair, data, ctx, cfg.rank_tolerance);
        const ResidualOutcome rb = residualize(b, shared, pair, data, ctx, cfg.rank_tolerance);
        const bool dep_a = permutation_dependent(ra.series, data.at(b), 0.10, 99,
                                                 derive_seed(cfg.seed, "sep|" + a + "|" + b));
        const bool dep_b = permutation_dependent(rb.series, data.at(a), 0.10, 99,
                                                 derive_seed(cfg.seed, "sep|" + b + "|" + a));
        if (!dep_a && !dep_b) graph.remove_undirected(a, b);
    }
}

void eliminate_redundant(CausalGraph& graph, const ResidualContext& ctx, const Dataset& data,
                         const Config& cfg) {
    // ancestry is taken from the causal-order edges as they stood before any
    // removal; removing a mediated edge never changes reachability
    const CausalGraph order_graph = graph;

    auto edges = graph.directed_edges;
    std::sort(edges.begin(), edges.end(), [](const DirectedEdge& x, const DirectedEdge& y) {
        return std::tie(x.from, x.to) < std::tie(y.from, y.to);
    });

    for (const auto& edge : edges) {
        const std::string& a = edge.from;
        const std::string& b = edge.to;
        const auto desc_a = order_graph.descendants(a);
        const auto anc_b = order_graph.ancestors(b);

        // maximal mediating set: every other variable whose a-descendants are
        // b-ancestors
        std::vector<std::string> xk;
        for (const auto& v : graph.observed) {
            if (v == a || v == b) continue;
            if (desc_a.count(v) && !anc_b.count(v)) continue;
            xk.push_back(v);
        }

        // independent components of a: its latent parents, its own noise, and
        // the noises of its ancestors
        std::vector<const IdentifiedComponent*> comps;
        for (const auto& c : ctx.components) {
            if (c.id.kind == ComponentDescriptor::Kind::LatentConfounder) {
                if (c.knows(a)) comps.push_back(&c);
            } else {
                if (c.id.name == a || order_graph.ancestors(a).count(c.id.name))
                    comps.push_back(&c);
            }
        }
        if (comps.empty()) continue;

        const auto loading_of = [&](const IdentifiedComponent* c, const std::string& label) {
            const auto it = c->loadings.find(label);
            if (it != c->loadings.end()) return it->second;
            if (c->id.kind == ComponentDescriptor::Kind::ObservedNoise && c->id.name == label)
                return 1.0;
            return 0.0;
        };

        const auto residual_indep = [&](const std::vector<std::string>& rows_tail) -> bool {
            Eigen::MatrixXd a_sub(static_cast<long>(1 + rows_tail.size()),
                                  static_cast<long>(comps.size()));
            for (std::size_t c = 0; c < comps.size(); ++c) {
                a_sub(0, static_cast<long>(c)) = loading_of(comps[c], b);
                for (std::size_t r = 0; r < rows_tail.size(); ++r)
                    a_sub(static_cast<long>(r + 1), static_cast<long>(c)) =
                        loading_of(comps[c], rows_tail[r]);
            }
            std::vector<Series> xk_series;
            for (const auto& l : rows_tail) xk_series.push_back(data.at(l));
            Series resid;
            try {
                resid = surrogate_residual(data.at(b), xk_series, a_sub, cfg.rank_tolerance);
            } catch (const NoNullSpaceError&) {
                return false;
            }
            const IndependenceResult ind = test_independence(
                resid, {data.at(a)}, cfg.effective_alpha(), cfg.n_permutations,
                derive_seed(cfg.seed, "prop1|" + a + "|" + b + "|" + std::to_string(rows_tail.size())),
                cfg.subsample_cap);
            return ind.independent;
        };

        std::vector<std::string> with_a = xk;
        with_a.insert(with_a.begin(), a);
        if (residual_indep(xk) && residual_indep(with_a)) {
            graph.remove_directed(a, b);
        }
    }
}

MixingMatrix assemble_mixing(const ResidualContext& ctx, const std::vector<std::string>& observed) {
    MixingMatrix mix;
    mix.rows = observed;
    mix.columns.reserve(ctx.components.size());
    for (const auto& c : ctx.components) mix.columns.push_back(c.id);
    mix.entries = Eigen::MatrixXd::Zero(static_cast<long>(observed.size()),
                                        static_cast<long>(ctx.components.size()));
    mix.estimated_mask.assign(observed.size(), std::vector<bool>(ctx.components.size(), false));
    for (std::size_t c = 0; c < ctx.components.size(); ++c)
        for (std::size_t r = 0; r < observed.size(); ++r) {
            const auto it = ctx.components[c].loadings.find(observed[r]);
            if (it != ctx.components[c].loadings.end()) {
                mix.entries(static_cast<long>(r), static_cast<long>(c)) = it->second;
                mix.estimated_mask[r][c] = true;
            }
        }
    return mix;
}

CausalGraph recover_coefficients(const MixingMatrix& mixing, const CausalGraph& graph) {
    CausalGraph out = graph;

    // resolved variables: not incident to any undirected edge
    std::vector<std::string> resolved;
    for (const auto& v : graph.observed) {
        bool touched = false;
        for (const auto& [a, b] : graph.undirected_edges)
            if (a == v || b == v) touched = true;
        if (!touched) resolved.push_back(v);
    }
    std::sort(resolved.begin(), resolved.end());
    const long nr = static_cast<long>(resolved.size());
    if (nr == 0) return out;

    // noise block over the resolved set, each column normalized to unit
    // diagonal (the noise of x_j loads on x_j with coefficient 1)
    Eigen::MatrixXd noise = Eigen::MatrixXd::Identity(nr, nr);
    for (long c = 0; c < nr; ++c) {
        const ComponentDescriptor id{ComponentDescriptor::Kind::ObservedNoise, resolved[c]};
        const int col = mixing.column_index(id);
        if (col < 0) continue;
        const int own_row = mixing.row_index(resolved[c]);
        double diag = 1.0;
        if (own_row >= 0 && mixing.estimated_mask[own_row][col])
            diag = mixing.entries(own_row, col);
        if (std::abs(diag) < 1e-12)
            throw CoefficientRecoveryError("recover_coefficients: zero diagonal noise loading");
        for (long r = 0; r < nr; ++r) {
            const int row = mixing.row_index(resolved[r]);
            if (row < 0 || !mixing.estimated_mask[row][col]) continue;
            noise(r, c) = mixing.entries(row, col) / diag;
        }
        noise(c, c) = 1.0;
    }

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(noise);
    if (!lu.isInvertible())
        throw CoefficientRecoveryError("recover_coefficients: singular noise block");
    const Eigen::MatrixXd i_minus_b = lu.inverse();
    const Eigen::MatrixXd b_hat = Eigen::MatrixXd::Identity(nr, nr) - i_minus_b;

    const auto rindex = [&](const std::string& label) -> long {
        for (long i = 0; i < nr; ++i)
            if (resolved[i] == label) return i;
        return -1;
    };

    for (auto& e : out.directed_edges) {
        const long to = rindex(e.to), from = rindex(e.from);
        if (to >= 0 && from >= 0) e.coefficient = b_hat(to, from);
    }
    for (auto& le : out.latent_edges) {
        const long child = rindex(le.child);
        if (child < 0) continue;
        const int col = mixing.column_index(
            {ComponentDescriptor::Kind::LatentConfounder, le.latent});
        if (col < 0) continue;
        Eigen::VectorXd mixcol = Eigen::VectorXd::Zero(nr);
        for (long r = 0; r < nr; ++r) {
            const int row = mixing.row_index(resolved[r]);
            if (row >= 0 && mixing.estimated_mask[row][col])
                mixcol(r) = mixing.entries(row, col);
        }
        const Eigen::VectorXd lambda_col = i_minus_b * mixcol;
        le.coefficient = lambda_col(child);
    }
    return out;
}

DiscoveryResult discover(const Dataset& data, const Config& cfg) {
    const auto t0 = std::chrono::steady_clock::now();

    if (data.n_columns() < 3) throw InputShapeError("discover: need at least 3 columns");
    if (data.n_samples() < 200) throw SampleSizeError("discover: need at least 200 samples");

    Dataset centered = center(data);
    for (const auto& col : centered.columns) {
        double ss = 0.0;
        for (const double v : col.values) ss += v * v;
        if (ss == 0.0)
            throw InputShapeError("discover: constant column '" + col.label + "'");
    }

    DiscoveryResult result;
    CausalGraph& graph = result.graph;
    graph.observed = centered.labels();
    std::sort(graph.observed.begin(), graph.observed.end());

    // line 1: complete undirected graph, minus pairs with no detectable
    // dependence at all (exact-level permutation contrast; the raw jackknife
    // multiple misreads heavy-tail coincidences as noise)
    for (std::size_t i = 0; i < graph.observed.size(); ++i)
        for (std::size_t j = i + 1; j < graph.observed.size(); ++j) {
            const auto& a = graph.observed[i];
            const auto& b = graph.observed[j];
            if (permutation_dependent(centered.at(a), centered.at(b), 0.05, 199,
                                      derive_seed(cfg.seed, "init|" + a + "|" + b)))
                graph.add_undirected(a, b);
        }

    const int max_rounds =
        cfg.max_rounds > 0 ? cfg.max_rounds : static_cast<int>(graph.observed.size());

    const auto sweep_start = std::chrono::steady_clock::now();
    for (int round = 1; round <= max_rounds; ++round) {
        result.rounds_run = round;
        const bool c1 = confounder_sweep(graph, result.context, centered, cfg);
        const bool c2 = order_sweep(graph, result.context, centered, cfg);
        if (!c1 && !c2) break;
    }
    result.sweep_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - sweep_start).count();

    separation_sweep(graph, result.context, centered, cfg);
    eliminate_redundant(graph, result.context, centered, cfg);

    // publish the identified latent structure onto the graph
    for (const auto& comp : result.context.components) {
        if (comp.id.kind != ComponentDescriptor::Kind::LatentConfounder) continue;
        for (const auto& [child, load] : comp.loadings)
            graph.latent_edges.push_back({comp.id.name, child, load});
    }

    result.mixing = assemble_mixing(result.context, graph.observed);
    try {
        result.graph = recover_coefficients(result.mixing, graph);
    } catch (const CoefficientRecoveryError& e) {
        result.graph = graph;
        result.graph.warnings.push_back(std::string("coefficient recovery failed: ") + e.what());
    }

    if (!result.graph.undirected_edges.empty())
        result.graph.warnings.push_back(
            "undirected edges remain: the data violate a model assumption somewhere, "
            "or the sample is too small to resolve them");
    result.graph.sort_canonical();

    result.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace hocd
