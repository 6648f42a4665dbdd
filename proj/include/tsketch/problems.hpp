#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string_view>

#include "tsketch/random.hpp"
#include "tsketch/sketch.hpp"

namespace tsketch {

enum class ProblemKind { WellConditioned, IllConditioned, Structured, SparseRecovery };

std::string_view to_string(ProblemKind kind);
/// "well" | "ill" | "structured" | "sparse"
ProblemKind parse_problem_kind(std::string_view name);

struct SparseTruth {
    Eigen::VectorXd signal;
    Eigen::Index support_size = 0;
};

/// A least-squares instance min ||A x - b||^2 with A of size (n1*n2) x p.
struct ProblemInstance {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::Index n1 = 0, n2 = 0, p = 0;
    ProblemKind kind = ProblemKind::WellConditioned;
    std::optional<KroneckerColumns<double>> kron_factors;  // iff Structured
    Eigen::VectorXd x_ref;
    std::optional<SparseTruth> sparse_truth;  // iff SparseRecovery
    Eigen::VectorXd singular_values;          // prescribed spectrum, when the kind has one
};

/// Thin Q factor of the QR decomposition of a rows x cols standard Gaussian matrix.
Eigen::MatrixXd random_orthonormal(Eigen::Index rows, Eigen::Index cols, Seed seed);

/// A = U diag(sigma) V^T with sigma_j ~ |N(1, 0.04)|; b = A x_ref + N(0, 0.01 I).
ProblemInstance gen_well_conditioned(Eigen::Index n1, Eigen::Index n2, Eigen::Index p, Seed seed);

/// As the well-conditioned family with sigma_j = 10^(-4 (j-1)/(p-1)).
ProblemInstance gen_ill_conditioned(Eigen::Index n1, Eigen::Index n2, Eigen::Index p, Seed seed);

/// Columns F(:,j) (x) G(:,j) with F, G each from the well-conditioned recipe.
ProblemInstance gen_structured(Eigen::Index n1, Eigen::Index n2, Eigen::Index p, Seed seed);

/// A = I_p (p = n1*n2), b = an s-sparse signal with N(0,1) values at uniform positions.
ProblemInstance gen_sparse_recovery(Eigen::Index n1, Eigen::Index n2, Eigen::Index s, Seed seed);

/// Dispatch on the regression kinds; `p` is the sparsity for SparseRecovery.
ProblemInstance generate(ProblemKind kind, Eigen::Index n1, Eigen::Index n2, Eigen::Index p, Seed seed);

/// S A, taking the Kronecker fast path when the instance carries factors.
template <class Scalar>
MatrixX<Scalar> sketch_matrix(const TensorSketch<Scalar>& S, const ProblemInstance& inst) {
    if (inst.kron_factors) return sketch_matrix(S, *inst.kron_factors);
    return sketch_matrix(S, inst.A);
}

/// PRB1: magic "PRB1", u64 n1, n2, p, kind, flags (bit0 kron factors, bit1
/// sparse truth), then column-major f64 blocks A, b, x_ref, [F, G],
/// [u64 s, signal]. Little-endian throughout.
void write_problem(std::ostream& os, const ProblemInstance& inst);
ProblemInstance read_problem(std::istream& is);

}  // namespace tsketch
