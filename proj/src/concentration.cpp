#include "tsketch/concentration.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

#include "tsketch/error.hpp"

namespace tsketch {

SubspaceSample sample_unit_sphere_subspace(const Eigen::MatrixXd& A, Eigen::Index count, Seed seed) {
    detail::require<ParameterError>(count >= 1, "sample_unit_sphere_subspace: count must be >= 1");
    SubspaceSample out;
    out.basis = range_basis(A);
    const Eigen::Index r = out.basis.cols();
    if (r == 0) throw PreconditionError("sample_unit_sphere_subspace: A has a zero range");
    Engine eng = make_engine(seed);
    std::normal_distribution<double> nd;
    out.coeffs.resize(r, count);
    for (Eigen::Index j = 0; j < count; ++j) {
        do {
            for (Eigen::Index i = 0; i < r; ++i) out.coeffs(i, j) = nd(eng);
        } while (out.coeffs.col(j).squaredNorm() == 0.0);
        out.coeffs.col(j).normalize();
    }
    return out;
}

double sup_embedding_error(const Eigen::MatrixXd& sketched) {
    if (sketched.cols() == 0) return 0.0;
    return (sketched.colwise().squaredNorm().array() - 1.0).abs().maxCoeff();
}

namespace {

EmbeddingErrorReport make_report(const TensorSketch<double>& S, const Eigen::MatrixXd& sketched,
                                 WidthEstimate width) {
    EmbeddingErrorReport rep;
    rep.sup_error = sup_embedding_error(sketched);
    rep.set_size = sketched.cols();
    rep.realized_M = max_xi_inf_norm(S);
    rep.width_estimate = width;
    rep.m = S.spec().m;
    rep.q = S.spec().q;
    return rep;
}

}  // namespace

EmbeddingErrorReport measure_sup_embedding_error(const SketchSpec& spec, const Eigen::MatrixXd& test_set, Seed seed,
                                                 std::optional<WidthEstimate> width) {
    detail::require<ShapeError>(test_set.cols() == 0 || test_set.rows() == spec.n1 * spec.n2,
                                "measure_sup_embedding_error: vectors must have length n1*n2");
    for (Eigen::Index j = 0; j < test_set.cols(); ++j)
        if (std::abs(test_set.col(j).norm() - 1.0) > 1e-10)
            throw PreconditionError("measure_sup_embedding_error: test vector " + std::to_string(j) + " is not unit norm");
    SketchSpec s = spec;
    s.seed = seed;
    const auto S = sample_sketch<double>(s);
    const Eigen::MatrixXd SY = test_set.cols() == 0 ? Eigen::MatrixXd(s.m, 0) : sketch_matrix(S, test_set);
    return make_report(S, SY, width.value_or(WidthEstimate{}));
}

EmbeddingErrorReport measure_sup_embedding_error(const SketchSpec& spec, const SubspaceSample& test_set, Seed seed) {
    detail::require<ShapeError>(test_set.basis.rows() == spec.n1 * spec.n2,
                                "measure_sup_embedding_error: basis must have n1*n2 rows");
    SketchSpec s = spec;
    s.seed = seed;
    const auto S = sample_sketch<double>(s);
    const Eigen::MatrixXd SQ = sketch_matrix(S, test_set.basis);
    return make_report(S, SQ * test_set.coeffs, width_bound_rank(test_set.basis.cols()));
}

Eigen::MatrixXd random_psd_matrix(Eigen::Index n, Seed seed) {
    detail::require<ParameterError>(n >= 1, "random_psd_matrix: n must be >= 1");
    Engine eng = make_engine(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd G(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) G(i, j) = nd(eng);
    Eigen::MatrixXd M = G.transpose() * G;
    M = (0.5 * (M + M.transpose())).eval();  // exact symmetry
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    return M / es.eigenvalues().maxCoeff();
}

std::vector<double> hanson_wright_deviations(Eigen::Index n, Eigen::Index m, double q, QuadraticFormKind kind,
                                             std::int64_t n_trials, Seed seed, const FactorDistribution& dist) {
    detail::require<ParameterError>(n >= 1 && m >= 1, "hanson_wright: n and m must be >= 1");
    detail::require<ParameterError>(n_trials >= 1, "hanson_wright: n_trials must be >= 1");
    check_density(q);
    const bool identity = kind == QuadraticFormKind::Identity;
    const Eigen::MatrixXd A = identity ? Eigen::MatrixXd() : random_psd_matrix(n, derive_seed(seed, {0xA}));
    // E s^T A s = sum_i A_ii E[phi_i^2 sigma_i] = q tr(A) for unit-variance phi
    const double expectation = q * (identity ? static_cast<double>(n) : A.trace());

    std::vector<double> dev(static_cast<std::size_t>(n_trials));
    Eigen::VectorXd s(n);
    for (std::int64_t t = 0; t < n_trials; ++t) {
        FactorStream stream(derive_seed(seed, {0xB, static_cast<std::uint64_t>(t)}));
        double total = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            for (Eigen::Index i = 0; i < n; ++i) {
                const double phi = stream.draw(dist.kind);
                s(i) = stream.keep(q) ? phi : 0.0;
            }
            total += identity ? s.squaredNorm() : s.dot(A * s);
        }
        dev[static_cast<std::size_t>(t)] = std::abs(total / static_cast<double>(m) - expectation);
    }
    return dev;
}

TailCurve tail_curve(const std::vector<double>& deviations, const std::vector<double>& thresholds) {
    detail::require<ParameterError>(std::is_sorted(thresholds.begin(), thresholds.end()),
                                    "tail_curve: thresholds must be ascending");
    TailCurve c;
    c.thresholds = thresholds;
    c.n_trials = static_cast<std::int64_t>(deviations.size());
    std::vector<double> sorted = deviations;
    std::sort(sorted.begin(), sorted.end());
    for (double t : thresholds) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
        c.empirical_exceed_prob.push_back(sorted.empty() ? 0.0 : static_cast<double>(above) / sorted.size());
    }
    return c;
}

TailCurve hanson_wright_tail(Eigen::Index n, Eigen::Index m, double q, QuadraticFormKind kind, std::int64_t n_trials,
                             const std::vector<double>& thresholds, Seed seed, const FactorDistribution& dist) {
    detail::require<ParameterError>(n_trials >= 100, "hanson_wright_tail: n_trials must be >= 100");
    return tail_curve(hanson_wright_deviations(n, m, q, kind, n_trials, seed, dist), thresholds);
}

}  // namespace tsketch
