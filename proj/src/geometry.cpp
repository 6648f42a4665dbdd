#include "tsketch/geometry.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <random>

#include "tsketch/error.hpp"

namespace tsketch {

Eigen::Index numerical_rank(const Eigen::MatrixXd& A) {
    if (A.size() == 0) return 0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
    svd.setThreshold(1e-12);
    return svd.rank();
}

Eigen::MatrixXd range_basis(const Eigen::MatrixXd& A) {
    if (A.size() == 0) return Eigen::MatrixXd(A.rows(), 0);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
    svd.setThreshold(1e-12);
    return svd.matrixU().leftCols(svd.rank());
}

WidthEstimate subspace_width_mc(const Eigen::MatrixXd& A, std::int64_t n_samples, Seed seed) {
    detail::require<ParameterError>(n_samples >= 1, "subspace_width_mc: n_samples must be >= 1");
    WidthEstimate w;
    w.method = WidthMethod::MonteCarloSubspace;
    w.n_samples = n_samples;
    const Eigen::MatrixXd Q = range_basis(A);
    if (Q.cols() == 0) return w;

    Engine eng = make_engine(seed);
    std::normal_distribution<double> nd;
    Eigen::VectorXd g(A.rows());
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t t = 0; t < n_samples; ++t) {
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = nd(eng);
        // sup over the cap is attained at P g / ||P g||, with value ||P g|| = ||Q^T g||
        const double v = (Q.transpose() * g).norm();
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(n_samples);
    w.value = sum / n;
    if (n_samples > 1) {
        const double var = std::max(0.0, (sumsq - n * w.value * w.value) / (n - 1.0));
        w.std_err = std::sqrt(var / n);
    }
    return w;
}

WidthEstimate width_bound_rank(std::int64_t r) {
    detail::require<ParameterError>(r >= 0, "width_bound_rank: rank must be >= 0");
    return {2.0 * std::sqrt(static_cast<double>(r)), WidthMethod::AnalyticRank, 0, 0.0};
}

WidthEstimate width_bound_l1_cone(std::int64_t s, std::int64_t p) {
    detail::require<ParameterError>(p >= 2, "width_bound_l1_cone: p must be >= 2");
    detail::require<ParameterError>(s >= 1 && s <= p, "width_bound_l1_cone: need 1 <= s <= p");
    const double sparse = 6.0 * std::sqrt(static_cast<double>(s) * std::log(static_cast<double>(p)));
    const double dense = 2.0 * std::sqrt(static_cast<double>(p));
    return {std::min(sparse, dense), WidthMethod::AnalyticL1Cone, 0, 0.0};
}

DimensionBound sketch_dim_bound(const WidthEstimate& width, double epsilon, double delta, double q, double C) {
    detail::require<ParameterError>(epsilon > 0.0 && epsilon < 1.0, "sketch_dim_bound: epsilon must lie in (0, 1)");
    detail::require<ParameterError>(delta > 0.0 && delta < 0.5, "sketch_dim_bound: delta must lie in (0, 1/2)");
    detail::require<ParameterError>(q > 0.0 && q <= 1.0, "sketch_dim_bound: q must lie in (0, 1]");
    detail::require<ParameterError>(C > 0.0, "sketch_dim_bound: C must be positive");
    detail::require<ParameterError>(width.value >= 0.0, "sketch_dim_bound: width must be nonnegative");
    DimensionBound d;
    d.epsilon = epsilon;
    d.delta = delta;
    d.q = q;
    d.C = C;
    const double e2 = epsilon * epsilon;
    d.width_term = width.value * width.value / (e2 * q * q);
    d.logdelta_term = std::abs(std::log(delta)) / (e2 * q);
    const double raw = C * std::max(d.width_term, d.logdelta_term);
    // absorb roundoff so that exactly-integral products do not round up
    d.m_lower = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(raw * (1.0 - 1e-12))));
    return d;
}

}  // namespace tsketch
