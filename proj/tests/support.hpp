#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace testsupport {

inline double rel_err(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    const double den = want.norm();
    return den == 0.0 ? got.norm() : (got - want).norm() / den;
}

inline Eigen::VectorXd kron(const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
    Eigen::VectorXd out(f.size() * g.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) out.segment(i * g.size(), g.size()) = f(i) * g;
    return out;
}

// l1-ball projection by bisection on the soft-threshold level, independent of the sort-based path
inline Eigen::VectorXd project_l1_bisection(const Eigen::VectorXd& v, double R) {
    if (v.lpNorm<1>() <= R) return v;
    auto mass = [&](double t) { return (v.array().abs() - t).max(0.0).sum(); };
    double lo = 0.0, hi = v.cwiseAbs().maxCoeff();
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (mass(mid) > R ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    return (v.array().sign() * (v.array().abs() - t).max(0.0)).matrix();
}

}  // namespace testsupport
