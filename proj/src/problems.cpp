#include "tsketch/problems.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "tsketch/binary_io.hpp"
#include "tsketch/error.hpp"

namespace tsketch {

namespace {

// Stream tags under an instance seed.
enum : std::uint64_t { kLeft = 1, kRight = 2, kSpectrum = 3, kReference = 4, kNoise = 5, kFactorF = 10, kFactorG = 20 };

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Seed seed) {
    Engine eng = make_engine(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = nd(eng);
    return M;
}

Eigen::VectorXd well_conditioned_spectrum(Eigen::Index p, Seed seed) {
    Engine eng = make_engine(seed);
    std::normal_distribution<double> nd(1.0, 0.2);
    Eigen::VectorXd s(p);
    for (Eigen::Index j = 0; j < p; ++j) s(j) = std::abs(nd(eng));
    return s;
}

Eigen::VectorXd ill_conditioned_spectrum(Eigen::Index p) {
    Eigen::VectorXd s(p);
    for (Eigen::Index j = 0; j < p; ++j) s(j) = std::pow(10.0, -4.0 * static_cast<double>(j) / static_cast<double>(p - 1));
    return s;
}

Eigen::MatrixXd assemble_svd(Eigen::Index rows, const Eigen::VectorXd& sigma, Seed seed) {
    const Eigen::Index p = sigma.size();
    const Eigen::MatrixXd U = random_orthonormal(rows, p, derive_seed(seed, {kLeft}));
    const Eigen::MatrixXd V = random_orthonormal(p, p, derive_seed(seed, {kRight}));
    return U * sigma.asDiagonal() * V.transpose();
}

void attach_rhs(ProblemInstance& inst, Seed seed) {
    Engine ref = make_engine(seed, {kReference});
    std::normal_distribution<double> xr(1.0, 0.5);
    inst.x_ref.resize(inst.p);
    for (Eigen::Index j = 0; j < inst.p; ++j) inst.x_ref(j) = xr(ref);
    Engine noise = make_engine(seed, {kNoise});
    std::normal_distribution<double> nd(0.0, 0.1);
    inst.b = inst.A * inst.x_ref;
    for (Eigen::Index i = 0; i < inst.b.size(); ++i) inst.b(i) += nd(noise);
}

void check_regression_dims(Eigen::Index n1, Eigen::Index n2, Eigen::Index p) {
    detail::require<ParameterError>(n1 >= 1 && n2 >= 1 && p >= 1, "problem dimensions must be >= 1");
    detail::require<ParameterError>(p <= n1 * n2, "p must not exceed n1*n2");
}

ProblemInstance spectral_instance(ProblemKind kind, Eigen::Index n1, Eigen::Index n2, Eigen::Index p,
                                  Eigen::VectorXd sigma, Seed seed) {
    ProblemInstance inst;
    inst.kind = kind;
    inst.n1 = n1;
    inst.n2 = n2;
    inst.p = p;
    inst.singular_values = std::move(sigma);
    inst.A = assemble_svd(n1 * n2, inst.singular_values, seed);
    attach_rhs(inst, seed);
    return inst;
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::WellConditioned: return "well";
        case ProblemKind::IllConditioned: return "ill";
        case ProblemKind::Structured: return "structured";
        case ProblemKind::SparseRecovery: return "sparse";
    }
    return "?";
}

ProblemKind parse_problem_kind(std::string_view name) {
    if (name == "well") return ProblemKind::WellConditioned;
    if (name == "ill") return ProblemKind::IllConditioned;
    if (name == "structured") return ProblemKind::Structured;
    if (name == "sparse") return ProblemKind::SparseRecovery;
    throw ParameterError("unknown problem kind '" + std::string(name) + "'");
}

Eigen::MatrixXd random_orthonormal(Eigen::Index rows, Eigen::Index cols, Seed seed) {
    detail::require<ParameterError>(cols >= 1 && cols <= rows, "random_orthonormal: need 1 <= cols <= rows");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(rows, cols, seed));
    return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

ProblemInstance gen_well_conditioned(Eigen::Index n1, Eigen::Index n2, Eigen::Index p, Seed seed) {
    check_regression_dims(n1, n2, p);
    return spectral_instance(ProblemKind::WellConditioned, n1, n2, p,
                             well_conditioned_spectrum(p, derive_seed(seed, {kSpectrum})), seed);
}

ProblemInstance gen_ill_conditioned(Eigen::Index n1, Eigen::Index n2, Eigen::Index p, Seed seed) {
    check_regression_dims(n1, n2, p);
    detail::require<ParameterError>(p >= 2, "ill-conditioned spectrum needs p >= 2");
    return spectral_instance(ProblemKind::IllConditioned, n1, n2, p, ill_conditioned_spectrum(p), seed);
}

ProblemInstance gen_structured(Eigen::Index n1, Eigen::Index n2, Eigen::Index p, Seed seed) {
    check_regression_dims(n1, n2, p);
    detail::require<ParameterError>(n1 >= p && n2 >= p, "structured instances need n1 >= p and n2 >= p");
    const Seed sf = derive_seed(seed, {kFactorF});
    const Seed sg = derive_seed(seed, {kFactorG});
    KroneckerColumns<double> factors;
    factors.F = assemble_svd(n1, well_conditioned_spectrum(p, derive_seed(sf, {kSpectrum})), sf);
    factors.G = assemble_svd(n2, well_conditioned_spectrum(p, derive_seed(sg, {kSpectrum})), sg);
    ProblemInstance inst;
    inst.kind = ProblemKind::Structured;
    inst.n1 = n1;
    inst.n2 = n2;
    inst.p = p;
    inst.A = assemble(factors);
    inst.kron_factors = std::move(factors);
    attach_rhs(inst, seed);
    return inst;
}

ProblemInstance gen_sparse_recovery(Eigen::Index n1, Eigen::Index n2, Eigen::Index s, Seed seed) {
    detail::require<ParameterError>(n1 >= 1 && n2 >= 1, "problem dimensions must be >= 1");
    const Eigen::Index p = n1 * n2;
    detail::require<ParameterError>(s >= 1 && s <= p, "sparse recovery needs 1 <= s <= p");
    Engine pos = make_engine(seed, {kSpectrum});
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), Eigen::Index(0));
    // partial Fisher-Yates: the first s slots are a uniform s-subset
    for (Eigen::Index i = 0; i < s; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, p - 1);
        std::swap(idx[i], idx[pick(pos)]);
    }
    Engine val = make_engine(seed, {kReference});
    std::normal_distribution<double> nd;
    SparseTruth truth;
    truth.support_size = s;
    truth.signal = Eigen::VectorXd::Zero(p);
    for (Eigen::Index i = 0; i < s; ++i) truth.signal(idx[i]) = nd(val);

    ProblemInstance inst;
    inst.kind = ProblemKind::SparseRecovery;
    inst.n1 = n1;
    inst.n2 = n2;
    inst.p = p;
    inst.A = Eigen::MatrixXd::Identity(p, p);
    inst.b = truth.signal;
    inst.x_ref = truth.signal;
    inst.sparse_truth = std::move(truth);
    return inst;
}

ProblemInstance generate(ProblemKind kind, Eigen::Index n1, Eigen::Index n2, Eigen::Index p, Seed seed) {
    switch (kind) {
        case ProblemKind::WellConditioned: return gen_well_conditioned(n1, n2, p, seed);
        case ProblemKind::IllConditioned: return gen_ill_conditioned(n1, n2, p, seed);
        case ProblemKind::Structured: return gen_structured(n1, n2, p, seed);
        case ProblemKind::SparseRecovery: return gen_sparse_recovery(n1, n2, p, seed);
    }
    throw ParameterError("unknown problem kind");
}

void write_problem(std::ostream& os, const ProblemInstance& inst) {
    binio::put_magic(os, "PRB1");
    binio::put_u64(os, static_cast<std::uint64_t>(inst.n1));
    binio::put_u64(os, static_cast<std::uint64_t>(inst.n2));
    binio::put_u64(os, static_cast<std::uint64_t>(inst.p));
    binio::put_u64(os, static_cast<std::uint64_t>(inst.kind));
    const std::uint64_t flags = (inst.kron_factors ? 1u : 0u) | (inst.sparse_truth ? 2u : 0u);
    binio::put_u64(os, flags);
    binio::put_col_major(os, inst.A);
    binio::put_col_major(os, inst.b);
    binio::put_col_major(os, inst.x_ref);
    if (inst.kron_factors) {
        binio::put_col_major(os, inst.kron_factors->F);
        binio::put_col_major(os, inst.kron_factors->G);
    }
    if (inst.sparse_truth) {
        binio::put_u64(os, static_cast<std::uint64_t>(inst.sparse_truth->support_size));
        binio::put_col_major(os, inst.sparse_truth->signal);
    }
}

ProblemInstance read_problem(std::istream& is) {
    binio::expect_magic(is, "PRB1");
    ProblemInstance inst;
    inst.n1 = binio::get_dim(is);
    inst.n2 = binio::get_dim(is);
    inst.p = binio::get_dim(is);
    binio::check_payload(double(inst.n1) * double(inst.n2) * double(inst.p + 1));
    const auto kind = binio::get_u64(is);
    detail::require<ShapeError>(kind <= 3, "PRB1: unknown problem kind");
    inst.kind = static_cast<ProblemKind>(kind);
    const auto flags = binio::get_u64(is);
    const Eigen::Index n = inst.n1 * inst.n2;
    inst.A.resize(n, inst.p);
    inst.b.resize(n);
    inst.x_ref.resize(inst.p);
    binio::get_col_major(is, inst.A);
    binio::get_col_major(is, inst.b);
    binio::get_col_major(is, inst.x_ref);
    if (flags & 1u) {
        KroneckerColumns<double> f;
        f.F.resize(inst.n1, inst.p);
        f.G.resize(inst.n2, inst.p);
        binio::get_col_major(is, f.F);
        binio::get_col_major(is, f.G);
        inst.kron_factors = std::move(f);
    }
    if (flags & 2u) {
        SparseTruth t;
        t.support_size = static_cast<Eigen::Index>(binio::get_u64(is));
        t.signal.resize(inst.p);
        binio::get_col_major(is, t.signal);
        inst.sparse_truth = std::move(t);
    }
    return inst;
}

}  // namespace tsketch
