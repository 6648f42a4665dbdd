#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "tsketch/error.hpp"
#include "tsketch/random.hpp"
#include "tsketch/sketch.hpp"

namespace tsketch {

template <class Scalar = double>
struct LsSolution {
    VectorX<Scalar> x;
    Scalar residual_sq{0};  // ||A x - b||^2
    int iterations = 0;     // 0 for direct solves
    bool converged = true;
};

enum class StepRule { FixedInverseLipschitz, Backtracking };

struct L1SolverOptions {
    double radius = 1.0;
    int max_iters = 0;  // 0 selects 50 * p
    double tol = 1e-10;
    StepRule step_rule = StepRule::FixedInverseLipschitz;
    int power_iters = 20;
    double lipschitz_safety = 1.1;
};

template <class Scalar, class DA, class Dx, class Db>
Scalar residual_sq(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<Dx>& x, const Eigen::MatrixBase<Db>& b) {
    return (A * x - b).squaredNorm();
}

/// Minimum-norm least-squares solution via SVD; singular values below
/// 1e-12 * sigma_max are treated as zero.
template <class Scalar, class DA, class Db>
LsSolution<Scalar> solve_unconstrained_impl(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<Db>& b) {
    detail::require<ParameterError>(A.rows() >= 1 && A.cols() >= 1, "solve_unconstrained: empty matrix");
    detail::require<ShapeError>(b.size() == A.rows(), "solve_unconstrained: b length must equal rows of A");
    const MatrixX<Scalar> Ad = A;
    Eigen::BDCSVD<MatrixX<Scalar>> svd(Ad, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(Scalar(1e-12));
    LsSolution<Scalar> sol;
    sol.x = svd.solve(b);
    sol.residual_sq = residual_sq<Scalar>(Ad, sol.x, b);
    return sol;
}

template <class DA, class Db>
auto solve_unconstrained(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<Db>& b) {
    return solve_unconstrained_impl<typename DA::Scalar>(A, b);
}

/// Euclidean projection onto {x : ||x||_1 <= R} by sorting magnitudes.
template <class Derived>
VectorX<typename Derived::Scalar> project_l1(const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar R) {
    using Scalar = typename Derived::Scalar;
    detail::require<ParameterError>(R > 0, "project_l1: radius must be positive");
    VectorX<Scalar> out = v;
    if (out.template lpNorm<1>() <= R) return out;
    std::vector<Scalar> mag(out.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) mag[i] = std::abs(out(i));
    std::sort(mag.begin(), mag.end(), std::greater<>());
    // theta = (sum_{i<=rho} mag_i - R) / rho for the largest rho with mag_rho > theta
    Scalar cumsum(0), theta(0);
    for (std::size_t i = 0; i < mag.size(); ++i) {
        cumsum += mag[i];
        const Scalar t = (cumsum - R) / static_cast<Scalar>(i + 1);
        if (mag[i] > t) theta = t;
    }
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const Scalar a = std::abs(out(i)) - theta;
        out(i) = a > 0 ? std::copysign(a, out(i)) : Scalar(0);
    }
    return out;
}

/// Zero entries with magnitude below `cutoff`.
template <class Derived>
VectorX<typename Derived::Scalar> hard_threshold(const Eigen::MatrixBase<Derived>& x,
                                                 typename Derived::Scalar cutoff = 1e-8) {
    using Scalar = typename Derived::Scalar;
    return x.unaryExpr([cutoff](Scalar v) { return std::abs(v) < cutoff ? Scalar(0) : v; });
}

/// Largest eigenvalue of A^T A by power iteration from a fixed pseudo-random start.
template <class Derived>
typename Derived::Scalar power_iteration_gram(const Eigen::MatrixBase<Derived>& A, int iters) {
    using Scalar = typename Derived::Scalar;
    Engine eng = make_engine(0x5eedULL);
    std::normal_distribution<double> nd;
    VectorX<Scalar> v(A.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = static_cast<Scalar>(nd(eng));
    v.normalize();
    Scalar lambda(0);
    for (int it = 0; it < iters; ++it) {
        VectorX<Scalar> w = A.transpose() * (A * v);
        lambda = v.dot(w);
        const Scalar nw = w.norm();
        if (nw == Scalar(0)) return Scalar(0);
        v = w / nw;
    }
    return lambda;
}

/// Projected gradient on min ||A x - b||^2 s.t. ||x||_1 <= R.
///
/// Steps are 1/L with L = safety * sigma_max(A)^2 from power iteration, or
/// found by backtracking from that estimate. Stops when the relative decrease
/// of the objective drops to `tol`, or the objective reaches tol^2 * ||b||^2.
/// Non-convergence is reported through `converged`, never thrown.
template <class DA, class Db>
LsSolution<typename DA::Scalar> solve_l1_constrained(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<Db>& b,
                                                     const L1SolverOptions& opts,
                                                     std::vector<double>* objective_trace = nullptr) {
    using Scalar = typename DA::Scalar;
    detail::require<ParameterError>(opts.radius > 0, "solve_l1_constrained: radius must be positive");
    detail::require<ParameterError>(opts.tol > 0, "solve_l1_constrained: tol must be positive");
    detail::require<ParameterError>(opts.max_iters >= 0, "solve_l1_constrained: max_iters must be >= 1");
    detail::require<ShapeError>(b.size() == A.rows(), "solve_l1_constrained: b length must equal rows of A");
    const Eigen::Index p = A.cols();
    const int max_iters = opts.max_iters > 0 ? opts.max_iters : static_cast<int>(std::max<Eigen::Index>(50 * p, 1));
    const Scalar R = static_cast<Scalar>(opts.radius);

    LsSolution<Scalar> sol;
    sol.x = VectorX<Scalar>::Zero(p);
    sol.converged = false;
    VectorX<Scalar> r = -b;  // A x - b at x = 0
    Scalar f = Scalar(0.5) * r.squaredNorm();
    const Scalar floor = Scalar(opts.tol * opts.tol) * f;
    if (objective_trace) objective_trace->push_back(static_cast<double>(f));
    if (f == Scalar(0)) {
        sol.converged = true;
        sol.residual_sq = 0;
        return sol;
    }

    Scalar L = static_cast<Scalar>(opts.lipschitz_safety) * power_iteration_gram(A, opts.power_iters);
    if (!(L > Scalar(0))) L = std::numeric_limits<Scalar>::min();

    for (int it = 1; it <= max_iters; ++it) {
        const VectorX<Scalar> grad = A.transpose() * r;
        VectorX<Scalar> x_new;
        VectorX<Scalar> r_new;
        Scalar f_new;
        while (true) {
            x_new = project_l1(sol.x - grad / L, R);
            r_new = A * x_new - b;
            f_new = Scalar(0.5) * r_new.squaredNorm();
            if (opts.step_rule == StepRule::FixedInverseLipschitz) break;
            const VectorX<Scalar> d = x_new - sol.x;
            if (f_new <= f + grad.dot(d) + Scalar(0.5) * L * d.squaredNorm() * (1 + 1e-12)) break;
            L *= 2;
        }
        sol.iterations = it;
        const Scalar decrease = f - f_new;
        if (f_new > f) {
            // the power-iteration estimate undershot the Lipschitz constant
            L *= 2;
            continue;
        }
        sol.x = std::move(x_new);
        r = std::move(r_new);
        if (objective_trace) objective_trace->push_back(static_cast<double>(f_new));
        if (f_new <= floor || decrease <= Scalar(opts.tol) * f) {
            f = std::min(f, f_new);
            sol.converged = true;
            break;
        }
        f = std::min(f, f_new);
    }
    sol.residual_sq = (A * sol.x - b).squaredNorm();
    return sol;
}

/// |(||A x_hat - b||^2 - ||A x* - b||^2) / ||A x* - b||^2|.
template <class Scalar>
Scalar error_ratio_from_residuals(Scalar residual_hat, Scalar residual_star) {
    if (!(residual_star > Scalar(0)))
        throw PreconditionError("error_ratio: optimal residual is zero; use a noisy instance");
    return std::abs((residual_hat - residual_star) / residual_star);
}

template <class DA, class Db, class Dh, class Ds>
typename DA::Scalar error_ratio(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<Db>& b,
                                const Eigen::MatrixBase<Dh>& x_hat, const Eigen::MatrixBase<Ds>& x_star) {
    using Scalar = typename DA::Scalar;
    return error_ratio_from_residuals<Scalar>((A * x_hat - b).squaredNorm(), (A * x_star - b).squaredNorm());
}

}  // namespace tsketch
