#include "hocd/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "hocd/rng.hpp"

namespace hocd {

namespace {

std::vector<std::string> var_names(const char* prefix, int count) {
    std::vector<std::string> out;
    for (int i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

struct CaseBuilder {
    int p = 0;
    int q = 0;
    std::vector<std::pair<int, int>> edges;          // (from, to), 1-based
    std::vector<std::pair<int, int>> latent_edges;   // (latent, child), 1-based

    void edge(int from, int to) { edges.emplace_back(from, to); }
    void latent(int l, int child) { latent_edges.emplace_back(l, child); }
    void drop_edge(int from, int to) {
        std::erase(edges, std::make_pair(from, to));
    }
    void drop_latent(int l, int child) {
        std::erase(latent_edges, std::make_pair(l, child));
    }
};

CaseBuilder case_structure(int case_id) {
    CaseBuilder c;
    auto base1 = [&] {  // L1 -> {X1, X2, X3}
        c.p = 3;
        c.q = 1;
        for (int v = 1; v <= 3; ++v) c.latent(1, v);
    };
    auto base7 = [&] {
        c.p = 6;
        c.q = 2;
        for (int v = 1; v <= 6; ++v) c.latent(1, v);
        for (int v = 4; v <= 6; ++v) c.latent(2, v);
        c.edge(2, 3);
        c.edge(2, 4);
        c.edge(3, 4);
        c.edge(3, 5);
        c.edge(4, 5);
    };
    switch (case_id) {
        case 1: base1(); break;
        case 2:
            base1();
            c.edge(2, 3);
            break;
        case 3:
            base1();
            c.p = 4;
            c.latent(1, 4);
            c.edge(1, 2);
            c.edge(3, 4);
            break;
        case 4:
            base1();
            c.edge(2, 3);
            c.p = 4;
            c.latent(1, 4);
            c.edge(3, 4);
            break;
        case 5:
            base1();
            c.p = 4;
            c.q = 2;
            for (int v = 2; v <= 4; ++v) c.latent(2, v);
            break;
        case 6:
            base1();
            c.p = 4;
            c.q = 2;
            for (int v = 2; v <= 4; ++v) c.latent(2, v);
            c.edge(2, 3);
            c.latent(1, 4);
            break;
        case 7: base7(); break;
        case 8:
            base7();
            c.drop_latent(2, 4);
            break;
        case 9:
            base7();
            c.drop_edge(3, 5);
            c.edge(5, 6);
            break;
        case 10:
            // cumulative on the Case 8/9 edits
            base7();
            c.drop_latent(2, 4);
            c.drop_edge(3, 5);
            c.edge(5, 6);
            c.drop_edge(2, 4);
            c.edge(1, 2);
            break;
        default: throw InputShapeError("build_case: case id must be in [1,10]");
    }
    return c;
}

}  // namespace

void ModelSpec::validate() const {
    const long p = static_cast<long>(observed.size());
    const long q = static_cast<long>(latents.size());
    if (b.rows() != p || b.cols() != p || lambda.rows() != p || lambda.cols() != q)
        throw InputShapeError("ModelSpec: matrix shapes do not match labels");
    // acyclic under the declared order: strictly lower-triangular B
    for (long i = 0; i < p; ++i)
        for (long j = i; j < p; ++j)
            if (b(i, j) != 0.0)
                throw InputShapeError("ModelSpec: B must be strictly lower triangular");
    if (q > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(lambda);
        if (svd.rank() < q) throw InputShapeError("ModelSpec: Lambda must have full column rank");
    }
}

ModelSpec build_case(int case_id, std::uint64_t seed) {
    const CaseBuilder c = case_structure(case_id);
    ModelSpec spec;
    spec.observed = var_names("X", c.p);
    spec.latents = var_names("L", c.q);
    spec.b = Eigen::MatrixXd::Zero(c.p, c.p);
    spec.lambda = Eigen::MatrixXd::Zero(c.p, c.q);

    Rng rng(derive_seed(seed, "case-coefficients", static_cast<std::uint64_t>(case_id)));
    for (const auto& [l, child] : c.latent_edges)
        spec.lambda(child - 1, l - 1) = rng.next_uniform(0.2, 0.8);
    for (const auto& [from, to] : c.edges)
        spec.b(to - 1, from - 1) = rng.next_uniform(0.2, 0.8);
    spec.validate();
    return spec;
}

ModelSpec random_model(int p, int n_latents, double edge_density, std::uint64_t seed) {
    if (p < 3) throw ConstraintError("random_model: p must be >= 3");
    if (n_latents < 1) throw ConstraintError("random_model: n_latents must be >= 1");
    // one reserved pure child per latent plus >= 2 shared children
    if (p - n_latents < 2)
        throw ConstraintError("random_model: not enough observed variables for "
                              + std::to_string(n_latents) + " latents with pure children");

    Rng rng(derive_seed(seed, "random-model"));
    ModelSpec spec;
    spec.observed = var_names("X", p);
    spec.latents = var_names("L", n_latents);
    spec.b = Eigen::MatrixXd::Zero(p, p);
    spec.lambda = Eigen::MatrixXd::Zero(p, n_latents);

    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    for (int i = p - 1; i > 0; --i)
        std::swap(order[i], order[rng.next_below(static_cast<std::uint64_t>(i + 1))]);

    // anchors: latent-exclusive, edge-free pure children
    std::vector<int> anchors(order.begin(), order.begin() + n_latents);
    std::vector<int> pool(order.begin() + n_latents, order.end());

    for (int l = 0; l < n_latents; ++l) {
        spec.lambda(anchors[l], l) = rng.next_uniform(0.2, 0.8);
        // at least two more children from the shared pool
        std::vector<int> shuffled = pool;
        for (std::size_t i = shuffled.size() - 1; i > 0; --i)
            std::swap(shuffled[i], shuffled[rng.next_below(i + 1)]);
        const int extra = 2 + static_cast<int>(rng.next_below(
                                  static_cast<std::uint64_t>(shuffled.size() - 1)));
        for (int k = 0; k < std::min<int>(extra, static_cast<int>(shuffled.size())); ++k)
            spec.lambda(shuffled[k], l) = rng.next_uniform(0.2, 0.8);
    }

    // directed edges only among pool variables, respecting the causal order
    for (std::size_t a = 0; a < pool.size(); ++a)
        for (std::size_t b = a + 1; b < pool.size(); ++b)
            if (rng.next_unit() < edge_density) {
                const int from = std::min(pool[a], pool[b]);
                const int to = std::max(pool[a], pool[b]);
                spec.b(to, from) = rng.next_uniform(0.2, 0.8);
            }

    spec.validate();
    return spec;
}

double draw_noise(Rng& rng, NoiseKind kind, bool standardize) {
    switch (kind) {
        case NoiseKind::CubedGaussian: {
            const double z = rng.next_normal();
            const double v = z * z * z;
            return standardize ? v / std::sqrt(15.0) : v;
        }
        case NoiseKind::Uniform: {
            constexpr double kHalfWidth = 1.7320508075688772;  // sqrt(3), unit variance
            return rng.next_uniform(-kHalfWidth, kHalfWidth);
        }
        case NoiseKind::ZeroKurtosisMixture: {
            // weight w on N(0, 2), else +-a two-point; solved so that the
            // variance is 1 and the excess kurtosis vanishes while the sixth
            // cumulant stays away from zero
            const double w = (11.0 - std::sqrt(57.0)) / 16.0;
            const double a = std::sqrt((1.0 - 2.0 * w) / (1.0 - w));
            if (rng.next_unit() < w) return rng.next_normal() * std::sqrt(2.0);
            return rng.next_unit() < 0.5 ? a : -a;
        }
    }
    return 0.0;
}

Dataset sample(const ModelSpec& spec, int n, std::uint64_t seed) {
    if (n < 1) throw InputShapeError("sample: n must be >= 1");
    spec.validate();
    const long p = static_cast<long>(spec.observed.size());
    const long q = static_cast<long>(spec.latents.size());

    const Eigen::MatrixXd unmix =
        (Eigen::MatrixXd::Identity(p, p) - spec.b).partialPivLu().inverse();

    Rng rng(derive_seed(seed, "sample"));
    Dataset data;
    data.columns.resize(p);
    for (long j = 0; j < p; ++j) {
        data.columns[j].label = spec.observed[j];
        data.columns[j].values.resize(n);
    }
    Eigen::VectorXd latent(q), noise(p);
    for (int r = 0; r < n; ++r) {
        for (long l = 0; l < q; ++l)
            latent(l) = draw_noise(rng, spec.noise_kind, spec.standardize_noise);
        for (long j = 0; j < p; ++j)
            noise(j) = draw_noise(rng, spec.noise_kind, spec.standardize_noise);
        const Eigen::VectorXd x = unmix * (spec.lambda * latent + noise);
        for (long j = 0; j < p; ++j) data.columns[j].values[r] = x(j);
    }
    return data;
}

MixingMatrix ground_truth_mixing(const ModelSpec& spec) {
    spec.validate();
    const long p = static_cast<long>(spec.observed.size());
    const long q = static_cast<long>(spec.latents.size());
    const Eigen::MatrixXd unmix =
        (Eigen::MatrixXd::Identity(p, p) - spec.b).partialPivLu().inverse();

    MixingMatrix mix;
    mix.rows = spec.observed;
    mix.entries.resize(p, q + p);
    mix.entries.leftCols(q) = unmix * spec.lambda;
    mix.entries.rightCols(p) = unmix;
    for (long l = 0; l < q; ++l)
        mix.columns.push_back({ComponentDescriptor::Kind::LatentConfounder, spec.latents[l]});
    for (long j = 0; j < p; ++j)
        mix.columns.push_back({ComponentDescriptor::Kind::ObservedNoise, spec.observed[j]});
    mix.estimated_mask.assign(p, std::vector<bool>(q + p, true));
    return mix;
}

CausalGraph ground_truth_graph(const ModelSpec& spec) {
    CausalGraph g;
    g.observed = spec.observed;
    g.latents = spec.latents;
    const long p = static_cast<long>(spec.observed.size());
    for (long j = 0; j < p; ++j)
        for (long i = 0; i < p; ++i)
            if (spec.b(i, j) != 0.0) g.add_directed(spec.observed[j], spec.observed[i], spec.b(i, j));
    for (long l = 0; l < static_cast<long>(spec.latents.size()); ++l)
        for (long i = 0; i < p; ++i)
            if (spec.lambda(i, l) != 0.0)
                g.latent_edges.push_back({spec.latents[l], spec.observed[i], spec.lambda(i, l)});
    g.sort_canonical();
    return g;
}

bool has_three_children_each(const ModelSpec& spec) {
    for (long l = 0; l < spec.lambda.cols(); ++l) {
        int children = 0;
        for (long i = 0; i < spec.lambda.rows(); ++i)
            if (spec.lambda(i, l) != 0.0) ++children;
        if (children < 3) return false;
    }
    return true;
}

bool has_pure_child_sets(const ModelSpec& spec) {
    // A child set of latent l is pure when no directed edge crosses the set
    // boundary. Searching subsets directly is exponential; equivalently, the
    // set of l's children with no observed edges to non-member variables,
    // grown within l's children, is pure iff some child has all its observed
    // neighbors inside l's child set and those neighbors recursively qualify.
    // For the sizes here (p <= ~12) a subset scan over children is fine.
    const long p = spec.lambda.rows();
    for (long l = 0; l < spec.lambda.cols(); ++l) {
        std::vector<long> children;
        for (long i = 0; i < p; ++i)
            if (spec.lambda(i, l) != 0.0) children.push_back(i);
        bool found = false;
        const std::size_t m = children.size();
        for (std::uint64_t mask = 1; mask < (1ULL << m) && !found; ++mask) {
            std::set<long> member;
            for (std::size_t k = 0; k < m; ++k)
                if (mask & (1ULL << k)) member.insert(children[k]);
            bool pure = true;
            for (const long v : member) {
                for (long o = 0; o < p && pure; ++o) {
                    if (member.count(o)) continue;
                    if (spec.b(v, o) != 0.0 || spec.b(o, v) != 0.0) pure = false;
                }
                if (!pure) break;
            }
            found = pure;
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace hocd
