#include <doctest.h>

#include "tsketch/problems.hpp"
#include "tsketch/sketch_io.hpp"

#include <sstream>

using namespace tsketch;

TEST_CASE("sketch dump round trip") {
    SketchSpec spec;
    spec.m = 17;
    spec.n1 = 5;
    spec.n2 = 6;
    spec.q = 0.35;
    spec.seed = 4;
    const auto S = sample_sketch(spec);
    std::stringstream ss;
    write_sketch(ss, S);
    CHECK(ss.str().substr(0, 4) == "TSK1");
    CHECK(ss.str().size() == 4 + 8 * 4 + 8 * 17 * 11);
    const auto d = read_sketch(ss);
    CHECK(d.m == 17);
    CHECK(d.n1 == 5);
    CHECK(d.n2 == 6);
    CHECK(d.q == 0.35);
    CHECK(d.eta == S.eta());
    CHECK(d.xi == S.xi());
    const auto back = to_sketch(d, spec.dist1, spec.dist2, spec.seed);
    const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(30, -1.0, 2.0);
    CHECK(apply(back, y) == apply(S, y));
}

TEST_CASE("malformed sketch dumps") {
    std::stringstream bad("TSK0xxxxxxxx");
    CHECK_THROWS_AS(read_sketch(bad), ShapeError);
    SketchSpec spec;
    spec.m = 3;
    spec.n1 = spec.n2 = 2;
    std::stringstream ss;
    write_sketch(ss, sample_sketch(spec));
    std::stringstream cut(ss.str().substr(0, ss.str().size() - 3));
    CHECK_THROWS_AS(read_sketch(cut), ShapeError);
    std::string huge = ss.str();
    huge[4 + 7] = '\x7f';  // top byte of m
    std::stringstream big(huge);
    CHECK_THROWS_AS(read_sketch(big), ShapeError);
}

TEST_CASE("problem dump round trip for every kind") {
    for (auto kind : {ProblemKind::WellConditioned, ProblemKind::IllConditioned, ProblemKind::Structured,
                      ProblemKind::SparseRecovery}) {
        const auto inst = generate(kind, 6, 7, 4, 11);
        std::stringstream ss;
        write_problem(ss, inst);
        const auto back = read_problem(ss);
        CHECK(back.kind == kind);
        CHECK(back.n1 == 6);
        CHECK(back.n2 == 7);
        CHECK(back.p == inst.p);
        CHECK(back.A == inst.A);
        CHECK(back.b == inst.b);
        CHECK(back.x_ref == inst.x_ref);
        CHECK(back.kron_factors.has_value() == inst.kron_factors.has_value());
        if (inst.kron_factors) {
            CHECK(back.kron_factors->F == inst.kron_factors->F);
            CHECK(back.kron_factors->G == inst.kron_factors->G);
        }
        CHECK(back.sparse_truth.has_value() == inst.sparse_truth.has_value());
        if (inst.sparse_truth) {
            CHECK(back.sparse_truth->signal == inst.sparse_truth->signal);
            CHECK(back.sparse_truth->support_size == inst.sparse_truth->support_size);
        }
    }
}

TEST_CASE("malformed problem dumps") {
    std::stringstream bad("PRBX");
    CHECK_THROWS_AS(read_problem(bad), ShapeError);
    std::stringstream ss;
    write_problem(ss, gen_well_conditioned(3, 3, 2, 1));
    std::stringstream cut(ss.str().substr(0, 60));
    CHECK_THROWS_AS(read_problem(cut), ShapeError);
}
