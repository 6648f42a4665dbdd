#include <doctest.h>

#include "support.hpp"
#include "tsketch/problems.hpp"
#include "tsketch/solvers.hpp"

#include <cmath>
#include <random>

using namespace tsketch;
using testsupport::project_l1_bisection;

namespace {

Eigen::MatrixXd gaussian_matrix(Eigen::Index r, Eigen::Index c, Seed seed) {
    Engine eng = make_engine(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd M(r, c);
    for (Eigen::Index i = 0; i < M.size(); ++i) M(i) = nd(eng);
    return M;
}

}  // namespace

TEST_CASE("unconstrained least squares") {
    SUBCASE("identity") {
        const Eigen::Vector3d b(1, 2, 3);
        const auto sol = solve_unconstrained(Eigen::Matrix3d::Identity(), b);
        CHECK((sol.x - b).norm() < 1e-14);
        CHECK(sol.residual_sq == doctest::Approx(0.0));
    }
    SUBCASE("mean of two points") {
        const Eigen::Vector2d a(1, 1), b(0, 2);
        const auto sol = solve_unconstrained(Eigen::MatrixXd(a), b);
        CHECK(sol.x(0) == doctest::Approx(1.0));
        CHECK(sol.residual_sq == doctest::Approx(2.0));
    }
    SUBCASE("normal equations on a random 100 x 15 system") {
        const auto A = gaussian_matrix(100, 15, 1);
        const Eigen::VectorXd b = gaussian_matrix(100, 1, 2);
        const auto sol = solve_unconstrained(A, b);
        const double opnorm = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
        CHECK((A.transpose() * (A * sol.x - b)).norm() < 1e-8 * opnorm * b.norm());
    }
    SUBCASE("rank deficient: minimum-norm solution") {
        Eigen::MatrixXd A(3, 2);
        A << 1, 1, 2, 2, 3, 3;
        const Eigen::Vector3d b(1, 2, 3);
        const auto sol = solve_unconstrained(A, b);
        CHECK(sol.x(0) == doctest::Approx(0.5));
        CHECK(sol.x(1) == doctest::Approx(0.5));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(solve_unconstrained(Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)), ParameterError);
        CHECK_THROWS_AS(solve_unconstrained(Eigen::MatrixXd::Ones(3, 2), Eigen::VectorXd::Ones(2)), ShapeError);
    }
}

TEST_CASE("l1-ball projection examples") {
    const Eigen::Vector3d inside(0.2, -0.3, 0.1);
    CHECK(project_l1(inside, 1.0) == inside);
    const Eigen::Vector2d v(3, 0);
    CHECK((project_l1(v, 1.0) - Eigen::Vector2d(1, 0)).norm() < 1e-15);
    CHECK_THROWS_AS(project_l1(v, 0.0), ParameterError);
    CHECK_THROWS_AS(project_l1(v, -1.0), ParameterError);
}

TEST_CASE("l1-ball projection matches the bisection oracle, p = 12") {
    for (Seed s = 0; s < 20; ++s) {
        const Eigen::VectorXd v = gaussian_matrix(12, 1, s);
        CHECK((project_l1(v, 1.0) - project_l1_bisection(v, 1.0)).norm() < 1e-9);
    }
}

TEST_CASE("l1-ball projection: feasibility, local optimality, oracle on 1000 random cases") {
    std::mt19937_64 eng(77);
    std::uniform_int_distribution<int> dim(1, 30);
    std::uniform_real_distribution<double> radius(0.05, 5.0), unit(-1.0, 1.0);
    std::normal_distribution<double> nd;
    for (int c = 0; c < 1000; ++c) {
        const int p = dim(eng);
        Eigen::VectorXd v(p);
        for (int i = 0; i < p; ++i) v(i) = 3.0 * nd(eng);
        const double R = radius(eng);
        const Eigen::VectorXd x = project_l1(v, R);
        REQUIRE(x.lpNorm<1>() <= R * (1 + 1e-12));
        CHECK((x - project_l1_bisection(v, R)).norm() < 1e-9);
        const double best = (x - v).norm();
        for (int t = 0; t < 20; ++t) {
            Eigen::VectorXd d(p);
            for (int i = 0; i < p; ++i) d(i) = unit(eng);
            Eigen::VectorXd z = x + 1e-3 * unit(eng) * d.normalized();
            if (z.lpNorm<1>() > R) z *= R / z.lpNorm<1>();
            CHECK((z - v).norm() >= best - 1e-12);
        }
    }
}

TEST_CASE("l1-constrained solver examples") {
    SUBCASE("b = 0") {
        const auto sol = solve_l1_constrained(gaussian_matrix(20, 5, 3), Eigen::VectorXd::Zero(20), L1SolverOptions{});
        CHECK(sol.x.norm() == 0.0);
        CHECK(sol.residual_sq == 0.0);
        CHECK(sol.converged);
    }
    SUBCASE("identity, b outside the ball") {
        const auto sol = solve_l1_constrained(Eigen::Matrix2d::Identity(), Eigen::Vector2d(2, 0), L1SolverOptions{});
        CHECK(sol.x(0) == doctest::Approx(1.0));
        CHECK(std::abs(sol.x(1)) < 1e-12);
        CHECK(sol.residual_sq == doctest::Approx(1.0));
    }
    SUBCASE("identity, dense b: solution on the boundary") {
        const Eigen::VectorXd b = gaussian_matrix(30, 1, 4);
        L1SolverOptions opts;
        opts.radius = 0.5 * b.lpNorm<1>();
        const auto sol = solve_l1_constrained(Eigen::MatrixXd::Identity(30, 30), b, opts);
        CHECK(std::abs(sol.x.lpNorm<1>() - opts.radius) < 1e-6);
    }
    SUBCASE("option errors") {
        L1SolverOptions bad;
        bad.radius = 0.0;
        CHECK_THROWS_AS(solve_l1_constrained(Eigen::Matrix2d::Identity(), Eigen::Vector2d(1, 0), bad), ParameterError);
        bad = {};
        bad.tol = 0.0;
        CHECK_THROWS_AS(solve_l1_constrained(Eigen::Matrix2d::Identity(), Eigen::Vector2d(1, 0), bad), ParameterError);
        CHECK_THROWS_AS(solve_l1_constrained(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(3), L1SolverOptions{}),
                        ShapeError);
    }
}

TEST_CASE("projected gradient: feasibility, descent, first-order optimality") {
    for (Seed s = 0; s < 10; ++s) {
        const auto A = gaussian_matrix(60, 25, 100 + s);
        const Eigen::VectorXd b = gaussian_matrix(60, 1, 200 + s);
        L1SolverOptions opts;
        opts.radius = 1.5;
        std::vector<double> trace;
        const auto sol = solve_l1_constrained(A, b, opts, &trace);
        CHECK(sol.x.lpNorm<1>() <= opts.radius + 1e-10);
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
        REQUIRE(sol.converged);
        const double L = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
        const Eigen::VectorXd g = A.transpose() * (A * sol.x - b);
        const Eigen::VectorXd fixed = project_l1(Eigen::VectorXd(sol.x - g / (L * L)), opts.radius);
        CHECK((fixed - sol.x).norm() <= 1e-4 * std::max(1.0, sol.x.norm()));
        CHECK(sol.residual_sq == doctest::Approx((A * sol.x - b).squaredNorm()));
    }
}

TEST_CASE("backtracking rule reaches the same optimum") {
    const auto A = gaussian_matrix(40, 10, 5);
    const Eigen::VectorXd b = gaussian_matrix(40, 1, 6);
    L1SolverOptions fixed, back;
    back.step_rule = StepRule::Backtracking;
    const auto a = solve_l1_constrained(A, b, fixed);
    const auto c = solve_l1_constrained(A, b, back);
    CHECK(a.residual_sq == doctest::Approx(c.residual_sq).epsilon(1e-6));
}

TEST_CASE("iteration cap reports non-convergence instead of throwing") {
    const auto A = gaussian_matrix(50, 40, 8);
    const Eigen::VectorXd b = gaussian_matrix(50, 1, 9);
    L1SolverOptions opts;
    opts.radius = 3.0;
    opts.max_iters = 2;
    const auto sol = solve_l1_constrained(A, b, opts);
    CHECK_FALSE(sol.converged);
    CHECK(sol.iterations == 2);
    CHECK(sol.x.lpNorm<1>() <= opts.radius + 1e-10);
}

TEST_CASE("hard threshold") {
    const Eigen::Vector3d x(1e-9, -0.5, -1e-9);
    CHECK(hard_threshold(x) == Eigen::Vector3d(0, -0.5, 0));
}

TEST_CASE("error ratio") {
    const auto A = gaussian_matrix(30, 4, 10);
    const Eigen::VectorXd b = gaussian_matrix(30, 1, 11);
    const auto star = solve_unconstrained(A, b);
    CHECK(error_ratio(A, b, star.x, star.x) == 0.0);
    CHECK(error_ratio_from_residuals(2.0, 1.0) == 1.0);
    CHECK(error_ratio_from_residuals(0.5, 1.0) == 0.5);
    CHECK_THROWS_AS(error_ratio_from_residuals(1.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(error_ratio(Eigen::Matrix2d::Identity(), Eigen::Vector2d(1, 2), Eigen::Vector2d(0, 0),
                                Eigen::Vector2d(1, 2)),
                    PreconditionError);
}

TEST_CASE("error ratio is bounded by eps^2 + 2 eps under the residual distortion") {
    const auto inst = gen_well_conditioned(16, 16, 6, 3);
    const auto star = solve_unconstrained(inst.A, inst.b);
    const double r_star = std::sqrt(star.residual_sq);
    for (int k = 0; k < 20; ++k) {
        const Eigen::MatrixXd SA = gaussian_matrix(60, 256, 500 + k) / std::sqrt(60.0) * inst.A;
        const Eigen::VectorXd Sb = gaussian_matrix(60, 256, 500 + k) / std::sqrt(60.0) * inst.b;
        const auto hat = solve_unconstrained(SA, Sb);
        const double eps = (inst.A * hat.x - inst.b).norm() / r_star - 1.0;
        REQUIRE(eps >= -1e-12);
        CHECK(error_ratio(inst.A, inst.b, hat.x, star.x) <= eps * eps + 2 * eps + 1e-12);
    }
}

TEST_CASE("identity operator leaves the solve unchanged") {
    const auto inst = gen_ill_conditioned(8, 8, 5, 2);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(64, 64);
    const auto a = solve_unconstrained(inst.A, inst.b);
    const auto c = solve_unconstrained(Eigen::MatrixXd(I * inst.A), Eigen::VectorXd(I * inst.b));
    CHECK(a.x == c.x);
    CHECK(error_ratio(inst.A, inst.b, c.x, a.x) < 1e-9);
}
