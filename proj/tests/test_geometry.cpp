#include <doctest.h>

#include "tsketch/geometry.hpp"
#include "tsketch/problems.hpp"

#include <cmath>
#include <random>

using namespace tsketch;

namespace {

double chi_mean(int r) { return std::sqrt(2.0) * std::exp(std::lgamma((r + 1) / 2.0) - std::lgamma(r / 2.0)); }

Eigen::MatrixXd low_rank(Eigen::Index n, Eigen::Index cols, Eigen::Index r, Seed seed) {
    return random_orthonormal(n, r, seed) * random_orthonormal(cols, r, seed + 1).transpose();
}

}  // namespace

TEST_CASE("Monte Carlo width of a line is E|N(0,1)|") {
    const auto w = subspace_width_mc(Eigen::MatrixXd::Identity(50, 50).col(3), 10000, 1);
    CHECK(w.method == WidthMethod::MonteCarloSubspace);
    CHECK(w.n_samples == 10000);
    CHECK(std::abs(w.value - std::sqrt(2.0 / M_PI)) < 3.0 * w.std_err);
}

TEST_CASE("Monte Carlo width of a rank-r range follows the chi mean") {
    for (int r : {2, 5, 15}) {
        const auto w = subspace_width_mc(low_rank(200, 30, r, 10 + r), 10000, r);
        CHECK(std::abs(w.value - chi_mean(r)) < 3.0 * w.std_err);
        CHECK(w.value <= 2.0 * std::sqrt(double(r)));
    }
}

TEST_CASE("Monte Carlo width never exceeds the rank bound, 100 random matrices") {
    std::mt19937_64 eng(5);
    std::uniform_int_distribution<int> rank(1, 12);
    for (int c = 0; c < 100; ++c) {
        const int r = rank(eng);
        const auto A = low_rank(60, 12, r, 1000 + c);
        REQUIRE(numerical_rank(A) == r);
        const auto w = subspace_width_mc(A, 200, c);
        CHECK(w.value <= width_bound_rank(r).value + 3.0 * w.std_err);
    }
}

TEST_CASE("zero matrix has width zero") {
    const auto w = subspace_width_mc(Eigen::MatrixXd::Zero(10, 3), 100, 1);
    CHECK(w.value == 0.0);
    CHECK(numerical_rank(Eigen::MatrixXd::Zero(10, 3)) == 0);
    CHECK_THROWS_AS(subspace_width_mc(Eigen::MatrixXd::Identity(3, 3), 0, 1), ParameterError);
}

TEST_CASE("range basis") {
    const auto A = low_rank(40, 8, 3, 7);
    const auto Q = range_basis(A);
    CHECK(Q.cols() == 3);
    CHECK((Q.transpose() * Q - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
    CHECK((A - Q * (Q.transpose() * A)).norm() < 1e-12);
}

TEST_CASE("rank bound") {
    CHECK(width_bound_rank(4).value == 4.0);
    CHECK(width_bound_rank(0).value == 0.0);
    CHECK(width_bound_rank(4).method == WidthMethod::AnalyticRank);
    const auto inst = gen_structured(64, 64, 15, 1);
    CHECK(width_bound_rank(numerical_rank(inst.A)).value == doctest::Approx(7.745966692414834));
    CHECK_THROWS_AS(width_bound_rank(-1), ParameterError);
}

TEST_CASE("l1 cone bound") {
    for (int p : {2, 8, 100, 256}) CHECK(width_bound_l1_cone(p, p).value == doctest::Approx(2.0 * std::sqrt(p)));
    const double a = 6.0 * std::sqrt(std::log(8.0)), b = 2.0 * std::sqrt(8.0);
    CHECK(a == doctest::Approx(8.6521613196));
    CHECK(width_bound_l1_cone(1, 8).value == std::min(a, b));
    CHECK(width_bound_l1_cone(1, 8).method == WidthMethod::AnalyticL1Cone);
    CHECK(width_bound_l1_cone(1, 100000).value == doctest::Approx(6.0 * std::sqrt(std::log(100000.0))));
    CHECK_THROWS_AS(width_bound_l1_cone(0, 8), ParameterError);
    CHECK_THROWS_AS(width_bound_l1_cone(9, 8), ParameterError);
    CHECK_THROWS_AS(width_bound_l1_cone(1, 1), ParameterError);
    for (int p = 2; p < 5000; p += 37)
        for (int s = 1; s <= p; s += 1 + p / 10)
            if (6.0 * std::sqrt(s * std::log(double(p))) <= 2.0 * std::sqrt(double(p)))
                CHECK(width_bound_l1_cone(s, p).value <= width_bound_rank(p).value);
}

TEST_CASE("sketch dimension bound") {
    SUBCASE("rank width reproduces 4 r / (eps^2 q^2)") {
        const auto d = sketch_dim_bound(width_bound_rank(15), 0.5, 0.1, 0.2);
        CHECK(d.width_term == doctest::Approx(4.0 * 15 / (0.25 * 0.04)));
        CHECK(d.logdelta_term == doctest::Approx(std::log(10.0) / (0.25 * 0.2)));
        CHECK(d.m_lower == 6000);
    }
    SUBCASE("halving eps quadruples m") {
        const auto a = sketch_dim_bound(width_bound_rank(4), 0.5, 0.1, 0.5);
        const auto b = sketch_dim_bound(width_bound_rank(4), 0.25, 0.1, 0.5);
        CHECK(a.m_lower == 256);
        CHECK(b.m_lower == 4 * a.m_lower);
    }
    SUBCASE("l1 cone width reproduces 36 s log p") {
        const double s = 5, p = 1e6;
        WidthEstimate w{6.0 * std::sqrt(s * std::log(p)), WidthMethod::AnalyticL1Cone, 0, 0.0};
        const auto d = sketch_dim_bound(w, 0.5, 0.1, 1.0);
        CHECK(d.width_term == doctest::Approx(36.0 * s * std::log(p) / 0.25).epsilon(1e-12));
    }
    SUBCASE("constant C scales the bound") {
        const auto d = sketch_dim_bound(width_bound_rank(4), 0.5, 0.1, 0.5, 3.0);
        CHECK(d.m_lower == 768);
    }
    SUBCASE("monotone in each argument") {
        const double eps[] = {0.1, 0.3, 0.6, 0.9};
        const double delta[] = {0.01, 0.1, 0.4};
        const double q[] = {0.05, 0.2, 0.7, 1.0};
        const double widths[] = {0.5, 2.0, 8.0};
        for (double w : widths)
            for (double e : eps)
                for (double dl : delta)
                    for (double qq : q) {
                        WidthEstimate W{w, WidthMethod::AnalyticRank, 0, 0.0};
                        const auto base = sketch_dim_bound(W, e, dl, qq).m_lower;
                        CHECK(sketch_dim_bound(W, std::min(e * 1.1, 0.99), dl, qq).m_lower <= base);
                        CHECK(sketch_dim_bound(W, e, std::min(dl * 1.2, 0.49), qq).m_lower <= base);
                        CHECK(sketch_dim_bound(W, e, dl, std::min(qq * 1.3, 1.0)).m_lower <= base);
                        WidthEstimate W2{w * 1.5, WidthMethod::AnalyticRank, 0, 0.0};
                        CHECK(sketch_dim_bound(W2, e, dl, qq).m_lower >= base);
                    }
    }
    SUBCASE("parameter ranges") {
        const auto w = width_bound_rank(3);
        CHECK_THROWS_AS(sketch_dim_bound(w, 0.0, 0.1, 0.5), ParameterError);
        CHECK_THROWS_AS(sketch_dim_bound(w, 1.0, 0.1, 0.5), ParameterError);
        CHECK_THROWS_AS(sketch_dim_bound(w, 0.5, 0.0, 0.5), ParameterError);
        CHECK_THROWS_AS(sketch_dim_bound(w, 0.5, 0.5, 0.5), ParameterError);
        CHECK_THROWS_AS(sketch_dim_bound(w, 0.5, 0.1, 0.0), ParameterError);
        CHECK_THROWS_AS(sketch_dim_bound(w, 0.5, 0.1, 1.5), ParameterError);
        CHECK_THROWS_AS(sketch_dim_bound(w, 0.5, 0.1, 0.5, 0.0), ParameterError);
    }
}
