#ifndef HOCD_SIMULATE_HPP
#define HOCD_SIMULATE_HPP

#include <cstdint>

#include <Eigen/Dense>

#include "hocd/graph.hpp"
#include "hocd/mixing.hpp"
#include "hocd/types.hpp"

namespace hocd {

enum class NoiseKind {
    CubedGaussian,        // standardized Z^3 (divide by sqrt(15))
    Uniform,              // uniform on [-sqrt(3), sqrt(3)]
    ZeroKurtosisMixture,  // symmetric Gaussian/two-point mixture, kappa4 = 0, kappa6 != 0
};

/// Ground-truth canonical model X = BX + Lambda L + S_X. B strictly
/// triangular under the observed order; latents and noises share noise_kind.
struct ModelSpec {
    std::vector<std::string> observed;
    std::vector<std::string> latents;
    Eigen::MatrixXd b;       // observed x observed
    Eigen::MatrixXd lambda;  // observed x latents
    NoiseKind noise_kind = NoiseKind::CubedGaussian;
    bool standardize_noise = true;

    void validate() const;  // DAG, full column rank of lambda
};

/// The benchmark structures: Cases 1-6, the easy six-variable Case 7, and the
/// assumption-violating Cases 8-10. Coefficients drawn U[0.2, 0.8] from seed.
ModelSpec build_case(int case_id, std::uint64_t seed);

/// Random DAG with each latent given >= 3 children and a reserved pure child.
ModelSpec random_model(int p, int n_latents, double edge_density, std::uint64_t seed);

/// i.i.d. draws solved through (I-B)^{-1}(Lambda L + S_X).
Dataset sample(const ModelSpec& spec, int n, std::uint64_t seed);

/// [(I-B)^{-1} Lambda | (I-B)^{-1}] with labeled columns.
MixingMatrix ground_truth_mixing(const ModelSpec& spec);

/// Structure of the spec as a CausalGraph with true coefficients.
CausalGraph ground_truth_graph(const ModelSpec& spec);

/// Assumption validators.
bool has_pure_child_sets(const ModelSpec& spec);    // every latent keeps a pure child set
bool has_three_children_each(const ModelSpec& spec);

/// Single standardized draw of the configured noise law.
double draw_noise(class Rng& rng, NoiseKind kind, bool standardize);

}  // namespace hocd

#endif
