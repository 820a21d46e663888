#include "hocd/eval.hpp"

#include <algorithm>
#include <set>

namespace hocd {

namespace {

PRF prf_from_counts(int truth, int found, int correct) {
    PRF out;
    if (truth == 0 && found == 0) {
        out.precision = out.recall = out.f1 = 1.0;  // vacuous agreement
        return out;
    }
    out.precision = found > 0 ? static_cast<double>(correct) / found : 0.0;
    out.recall = truth > 0 ? static_cast<double>(correct) / truth : 0.0;
    out.f1 = (out.precision + out.recall) > 0.0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

void require_same_labels(const CausalGraph& a, const CausalGraph& b) {
    std::vector<std::string> la = a.observed, lb = b.observed;
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    if (la != lb) throw InputShapeError("metrics: observed label sets differ");
}

std::set<std::pair<std::string, std::string>> nonadjacent_pairs(const CausalGraph& g) {
    std::set<std::pair<std::string, std::string>> out;
    std::vector<std::string> labels = g.observed;
    std::sort(labels.begin(), labels.end());
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j)
            if (!g.adjacent(labels[i], labels[j])) out.insert({labels[i], labels[j]});
    return out;
}

}  // namespace

PRF edge_metrics(const CausalGraph& learned, const CausalGraph& truth, RelationCounts* counts) {
    require_same_labels(learned, truth);
    const int n_truth = static_cast<int>(truth.directed_edges.size());
    // undirected learned edges are found-but-incorrect for the directed score
    const int n_found =
        static_cast<int>(learned.directed_edges.size() + learned.undirected_edges.size());
    int n_correct = 0;
    for (const auto& e : learned.directed_edges)
        if (truth.has_directed(e.from, e.to)) ++n_correct;
    if (counts) *counts = {n_truth, n_found, n_correct};
    return prf_from_counts(n_truth, n_found, n_correct);
}

PRF nonadjacency_metrics(const CausalGraph& learned, const CausalGraph& truth,
                         RelationCounts* counts) {
    require_same_labels(learned, truth);
    const auto l = nonadjacent_pairs(learned);
    const auto t = nonadjacent_pairs(truth);
    int n_correct = 0;
    for (const auto& p : l)
        if (t.count(p)) ++n_correct;
    if (counts) *counts = {static_cast<int>(t.size()), static_cast<int>(l.size()), n_correct};
    return prf_from_counts(static_cast<int>(t.size()), static_cast<int>(l.size()), n_correct);
}

double rmse(const CausalGraph& learned, const ModelSpec& truth) {
    const long p = static_cast<long>(truth.observed.size());
    const auto index_of = [&](const std::string& label) -> long {
        for (long i = 0; i < p; ++i)
            if (truth.observed[i] == label) return i;
        throw InputShapeError("rmse: unknown label " + label);
    };
    Eigen::MatrixXd b_hat = Eigen::MatrixXd::Zero(p, p);
    for (const auto& e : learned.directed_edges)
        if (e.coefficient) b_hat(index_of(e.to), index_of(e.from)) = *e.coefficient;
    double ss = 0.0;
    for (long i = 0; i < p; ++i)
        for (long j = 0; j < p; ++j) {
            const double d = truth.b(i, j) - b_hat(i, j);
            ss += d * d;
        }
    return std::sqrt(ss / (static_cast<double>(p) * static_cast<double>(p)));
}

MetricsReport evaluate_graphs(const CausalGraph& learned, const CausalGraph& truth) {
    MetricsReport rep;
    rep.directed = edge_metrics(learned, truth, &rep.directed_counts);
    rep.nonadjacent = nonadjacency_metrics(learned, truth, &rep.nonadjacent_counts);

    rep.latents_true = static_cast<int>(truth.latents.size());
    rep.latents_found = static_cast<int>(learned.latents.size());
    // greedy optimal matching by Jaccard of child sets (tiny counts)
    std::vector<std::set<std::string>> tsets, lsets;
    for (const auto& l : truth.latents) {
        const auto c = truth.latent_children(l);
        tsets.emplace_back(c.begin(), c.end());
    }
    for (const auto& l : learned.latents) {
        const auto c = learned.latent_children(l);
        lsets.emplace_back(c.begin(), c.end());
    }
    std::vector<bool> used(lsets.size(), false);
    for (const auto& ts : tsets) {
        double best = 0.0;
        int best_i = -1;
        for (std::size_t i = 0; i < lsets.size(); ++i) {
            if (used[i]) continue;
            std::vector<std::string> inter;
            std::set_intersection(ts.begin(), ts.end(), lsets[i].begin(), lsets[i].end(),
                                  std::back_inserter(inter));
            std::set<std::string> uni = ts;
            uni.insert(lsets[i].begin(), lsets[i].end());
            const double j = uni.empty() ? 0.0 : static_cast<double>(inter.size()) / uni.size();
            if (j > best) {
                best = j;
                best_i = static_cast<int>(i);
            }
        }
        if (best_i >= 0 && best >= 2.0 / 3.0) {
            used[best_i] = true;
            ++rep.latents_matched;
        }
    }
    return rep;
}

MetricsReport evaluate(const CausalGraph& learned, const ModelSpec& truth) {
    MetricsReport rep = evaluate_graphs(learned, ground_truth_graph(truth));
    rep.rmse = rmse(learned, truth);
    return rep;
}

}  // namespace hocd
