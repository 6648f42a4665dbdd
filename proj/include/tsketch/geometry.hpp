#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "tsketch/random.hpp"

namespace tsketch {

enum class WidthMethod { MonteCarloSubspace, AnalyticRank, AnalyticL1Cone };

/// Gaussian width W(T) = E sup_{y in T} <n, y> of a normalized set.
struct WidthEstimate {
    double value = 0.0;
    WidthMethod method = WidthMethod::AnalyticRank;
    std::int64_t n_samples = 0;  // 0 for analytic values
    double std_err = 0.0;
};

/// Lower bound on the sketch size, m >= C max(W^2/(eps^2 q^2), |log delta|/(eps^2 q)).
struct DimensionBound {
    std::int64_t m_lower = 1;
    double width_term = 0.0;
    double logdelta_term = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    double q = 1.0;
    double C = 1.0;
};

/// Numerical rank with cutoff 1e-12 * sigma_max (0 for the zero matrix).
Eigen::Index numerical_rank(const Eigen::MatrixXd& A);

/// Orthonormal basis of Range(A); zero columns for the zero matrix.
Eigen::MatrixXd range_basis(const Eigen::MatrixXd& A);

/// Monte Carlo width of Range(A) intersected with the unit sphere. Each draw
/// evaluates the supremum exactly as ||P_A n||_2.
WidthEstimate subspace_width_mc(const Eigen::MatrixXd& A, std::int64_t n_samples, Seed seed);

/// 2 sqrt(r): width bound for an r-dimensional subspace cap.
WidthEstimate width_bound_rank(std::int64_t r);

/// min(6 sqrt(s log p), 2 sqrt(p)): width bound for the l1 tangent cone at an
/// s-sparse optimum. Natural log.
WidthEstimate width_bound_l1_cone(std::int64_t s, std::int64_t p);

/// Sketch dimension lower bound for a given width. C is the unknown universal
/// constant; 1 is a convenient default for relative comparisons.
DimensionBound sketch_dim_bound(const WidthEstimate& width, double epsilon, double delta, double q, double C = 1.0);

}  // namespace tsketch
