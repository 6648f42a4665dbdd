#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "tsketch/distributions.hpp"
#include "tsketch/geometry.hpp"
#include "tsketch/sketch.hpp"

namespace tsketch {

/// Measured sup_{y in Y} | ||S y||^2 - 1 | for one sketch over a finite set Y.
/// A finite sample of a continuous set gives a lower bound on its true sup.
struct EmbeddingErrorReport {
    double sup_error = 0.0;
    Eigen::Index set_size = 0;
    double realized_M = 0.0;
    WidthEstimate width_estimate;
    Eigen::Index m = 0;
    double q = 1.0;
};

/// Unit vectors y = basis * coeffs(:, i) drawn uniformly from Range(A) on the sphere.
struct SubspaceSample {
    Eigen::MatrixXd basis;   // n x r, orthonormal columns
    Eigen::MatrixXd coeffs;  // r x count, unit columns

    Eigen::Index size() const noexcept { return coeffs.cols(); }
    Eigen::MatrixXd vectors() const { return basis * coeffs; }
};

SubspaceSample sample_unit_sphere_subspace(const Eigen::MatrixXd& A, Eigen::Index count, Seed seed);

/// max over columns of | ||col||^2 - 1 | for already-sketched unit vectors.
double sup_embedding_error(const Eigen::MatrixXd& sketched);

/// Draw one sketch (spec with its seed replaced by `seed`) and evaluate the
/// sup over the columns of `test_set`, which must be unit vectors.
EmbeddingErrorReport measure_sup_embedding_error(const SketchSpec& spec, const Eigen::MatrixXd& test_set, Seed seed,
                                                 std::optional<WidthEstimate> width = std::nullopt);

/// Same measurement on a subspace sample; sketches the basis once and maps
/// the coefficients, which is exact by linearity.
EmbeddingErrorReport measure_sup_embedding_error(const SketchSpec& spec, const SubspaceSample& test_set, Seed seed);

enum class QuadraticFormKind { Identity, RandomPSD };

/// Empirical P(|(1/m) sum_k s_k^T A s_k - E s^T A s| > t) at each threshold.
struct TailCurve {
    std::vector<double> thresholds;
    std::vector<double> empirical_exceed_prob;
    std::int64_t n_trials = 0;
};

/// G^T G / ||G^T G||_2 for an n x n standard Gaussian G.
Eigen::MatrixXd random_psd_matrix(Eigen::Index n, Seed seed);

/// Per-trial centered averages |(1/m) sum_k s_k^T A s_k - q tr(A)| with
/// s_k = phi o sigma: masked, NOT rescaled by 1/sqrt(q).
std::vector<double> hanson_wright_deviations(Eigen::Index n, Eigen::Index m, double q, QuadraticFormKind kind,
                                             std::int64_t n_trials, Seed seed,
                                             const FactorDistribution& dist = FactorDistribution::rademacher());

TailCurve hanson_wright_tail(Eigen::Index n, Eigen::Index m, double q, QuadraticFormKind kind, std::int64_t n_trials,
                             const std::vector<double>& thresholds, Seed seed,
                             const FactorDistribution& dist = FactorDistribution::rademacher());

/// Exceedance frequencies of precomputed deviations.
TailCurve tail_curve(const std::vector<double>& deviations, const std::vector<double>& thresholds);

}  // namespace tsketch
