#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tsketch/distributions.hpp"
#include "tsketch/error.hpp"
#include "tsketch/random.hpp"

namespace tsketch {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using RowMatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Parameters of an m x (n1*n2) row-wise Kronecker sketch.
struct SketchSpec {
    Eigen::Index m = 1;
    Eigen::Index n1 = 1;
    Eigen::Index n2 = 1;
    double q = 1.0;
    FactorDistribution dist1 = FactorDistribution::gaussian();
    FactorDistribution dist2 = FactorDistribution::rademacher();
    Seed seed = 0;
};

inline void validate(const SketchSpec& spec) {
    detail::require<ParameterError>(spec.m >= 1 && spec.n1 >= 1 && spec.n2 >= 1,
                                    "sketch dimensions m, n1, n2 must be >= 1");
    check_density(spec.q);
}

/// Which factor plays the bounded role (the "xi" of the embedding bound).
enum class BoundedFactor { Second, First, Neither };

/// Column factors of a matrix whose j-th column is F(:,j) (x) G(:,j).
template <class Scalar = double>
struct KroneckerColumns {
    MatrixX<Scalar> F;  // n1 x p
    MatrixX<Scalar> G;  // n2 x p
};

/// Packed nonzeros of a row-major factor matrix.
template <class Scalar>
struct PackedRows {
    std::vector<Eigen::Index> offsets;  // rows + 1
    std::vector<Eigen::Index> index;
    std::vector<Scalar> value;

    static PackedRows pack(const RowMatrixX<Scalar>& M) {
        PackedRows p;
        p.offsets.reserve(M.rows() + 1);
        p.offsets.push_back(0);
        for (Eigen::Index k = 0; k < M.rows(); ++k) {
            for (Eigen::Index i = 0; i < M.cols(); ++i) {
                if (M(k, i) != Scalar(0)) {
                    p.index.push_back(i);
                    p.value.push_back(M(k, i));
                }
            }
            p.offsets.push_back(static_cast<Eigen::Index>(p.index.size()));
        }
        return p;
    }
};

/// S = (1/sqrt(m)) [eta_k^T (x) xi_k^T]_k stored as its two factor matrices.
///
/// Rows of `eta` (m x n1) and `xi` (m x n2) are the factor vectors. Flat
/// vectors of length n1*n2 are laid out in row-major blocks: index
/// i1*n2 + i2 holds entry (i1, i2) of the n1 x n2 reshape.
template <class Scalar = double>
class TensorSketch {
public:
    using Factor = RowMatrixX<Scalar>;

    TensorSketch(SketchSpec spec, Factor eta, Factor xi) : spec_(std::move(spec)), eta_(std::move(eta)), xi_(std::move(xi)) {
        validate(spec_);
        detail::require<ShapeError>(eta_.rows() == spec_.m && eta_.cols() == spec_.n1,
                                    "eta must be m x n1");
        detail::require<ShapeError>(xi_.rows() == spec_.m && xi_.cols() == spec_.n2, "xi must be m x n2");
        scale_ = Scalar(1) / std::sqrt(static_cast<Scalar>(spec_.m));
        if (spec_.dist2.bounded())
            bounded_ = BoundedFactor::Second;
        else if (spec_.dist1.bounded())
            bounded_ = BoundedFactor::First;
        else
            bounded_ = BoundedFactor::Neither;
        if (spec_.q <= 0.5) {
            packed_eta_ = PackedRows<Scalar>::pack(eta_);
            packed_xi_ = PackedRows<Scalar>::pack(xi_);
            sparse_ = true;
        }
    }

    const SketchSpec& spec() const noexcept { return spec_; }
    const Factor& eta() const noexcept { return eta_; }
    const Factor& xi() const noexcept { return xi_; }
    Scalar scale() const noexcept { return scale_; }
    Eigen::Index rows() const noexcept { return spec_.m; }
    Eigen::Index cols() const noexcept { return spec_.n1 * spec_.n2; }

    /// The bounded law sits on the first factor; the roles were swapped.
    bool swapped() const noexcept { return bounded_ == BoundedFactor::First; }
    /// Neither factor is bounded (e.g. G+G); still usable, but the embedding
    /// bound's hypotheses do not hold.
    bool outside_hypotheses() const noexcept { return bounded_ == BoundedFactor::Neither; }
    BoundedFactor bounded_factor() const noexcept { return bounded_; }

    bool uses_sparse_rows() const noexcept { return sparse_; }
    const PackedRows<Scalar>& packed_eta() const noexcept { return packed_eta_; }
    const PackedRows<Scalar>& packed_xi() const noexcept { return packed_xi_; }

private:
    SketchSpec spec_;
    Factor eta_;
    Factor xi_;
    Scalar scale_{1};
    BoundedFactor bounded_ = BoundedFactor::Second;
    bool sparse_ = false;
    PackedRows<Scalar> packed_eta_;
    PackedRows<Scalar> packed_xi_;
};

/// Draw m independent (eta_k, xi_k) pairs. Deterministic in spec.seed; each
/// factor has its own value and mask streams, so rows are a prefix-stable
/// sequence in m.
template <class Scalar = double>
TensorSketch<Scalar> sample_sketch(const SketchSpec& spec) {
    validate(spec);
    RowMatrixX<Scalar> eta(spec.m, spec.n1);
    RowMatrixX<Scalar> xi(spec.m, spec.n2);
    FactorStream s1(derive_seed(spec.seed, {1}));
    FactorStream s2(derive_seed(spec.seed, {2}));
    for (Eigen::Index k = 0; k < spec.m; ++k) {
        auto er = eta.row(k);
        auto xr = xi.row(k);
        sample_factor_into(spec.dist1, spec.q, s1, er);
        sample_factor_into(spec.dist2, spec.q, s2, xr);
    }
    return TensorSketch<Scalar>(spec, std::move(eta), std::move(xi));
}

namespace detail {

template <class Scalar, class OutRow>
void accumulate_sparse_row(const TensorSketch<Scalar>& S, Eigen::Index k, const RowMatrixX<Scalar>& Arows,
                           OutRow&& out) {
    const auto& pe = S.packed_eta();
    const auto& px = S.packed_xi();
    const Eigen::Index n2 = S.spec().n2;
    for (Eigen::Index a = pe.offsets[k]; a < pe.offsets[k + 1]; ++a) {
        const Scalar we = pe.value[a] * S.scale();
        const Eigen::Index base = pe.index[a] * n2;
        for (Eigen::Index b = px.offsets[k]; b < px.offsets[k + 1]; ++b)
            out.noalias() += (we * px.value[b]) * Arows.row(base + px.index[b]);
    }
}

}  // namespace detail

/// S y, computed row by row as (1/sqrt(m)) eta_k^T Y xi_k with Y the n1 x n2 reshape of y.
template <class Scalar, class Derived>
VectorX<Scalar> apply(const TensorSketch<Scalar>& S, const Eigen::MatrixBase<Derived>& y) {
    detail::require<ShapeError>(y.size() == S.cols(), "apply: vector length must equal n1*n2");
    const auto& spec = S.spec();
    const VectorX<Scalar> yv = y;
    VectorX<Scalar> out(spec.m);
    if (S.uses_sparse_rows()) {
        const auto& pe = S.packed_eta();
        const auto& px = S.packed_xi();
        for (Eigen::Index k = 0; k < spec.m; ++k) {
            Scalar acc(0);
            for (Eigen::Index a = pe.offsets[k]; a < pe.offsets[k + 1]; ++a) {
                const Scalar* block = yv.data() + pe.index[a] * spec.n2;
                Scalar inner(0);
                for (Eigen::Index b = px.offsets[k]; b < px.offsets[k + 1]; ++b)
                    inner += block[px.index[b]] * px.value[b];
                acc += pe.value[a] * inner;
            }
            out(k) = acc * S.scale();
        }
        return out;
    }
    Eigen::Map<const RowMatrixX<Scalar>> Y(yv.data(), spec.n1, spec.n2);
    const RowMatrixX<Scalar> W = S.eta() * Y;
    out = W.cwiseProduct(S.xi()).rowwise().sum() * S.scale();
    return out;
}

/// S (f (x) g) = (1/sqrt(m)) <eta_k, f> <xi_k, g>, in O(m (n1 + n2)).
template <class Scalar, class DerivedF, class DerivedG>
VectorX<Scalar> apply_kron_column(const TensorSketch<Scalar>& S, const Eigen::MatrixBase<DerivedF>& f,
                                  const Eigen::MatrixBase<DerivedG>& g) {
    detail::require<ShapeError>(f.size() == S.spec().n1 && g.size() == S.spec().n2,
                                "apply_kron_column: factor lengths must be n1 and n2");
    return ((S.eta() * f).cwiseProduct(S.xi() * g)) * S.scale();
}

/// S A for a dense (n1*n2) x p matrix, column by column.
template <class Scalar, class Derived>
MatrixX<Scalar> sketch_matrix(const TensorSketch<Scalar>& S, const Eigen::MatrixBase<Derived>& A) {
    detail::require<ShapeError>(A.rows() == S.cols(), "sketch_matrix: A must have n1*n2 rows");
    const Eigen::Index p = A.cols();
    MatrixX<Scalar> out(S.rows(), p);
    if (p == 0) return out;
    if (S.uses_sparse_rows()) {
        const RowMatrixX<Scalar> Arows = A;
        RowMatrixX<Scalar> acc = RowMatrixX<Scalar>::Zero(S.rows(), p);
        for (Eigen::Index k = 0; k < S.rows(); ++k) detail::accumulate_sparse_row(S, k, Arows, acc.row(k));
        out = acc;
        return out;
    }
    for (Eigen::Index j = 0; j < p; ++j) out.col(j) = apply(S, A.col(j));
    return out;
}

/// S A for A with Kronecker columns, via (eta F) o (xi G) / sqrt(m).
template <class Scalar>
MatrixX<Scalar> sketch_matrix(const TensorSketch<Scalar>& S, const KroneckerColumns<Scalar>& A) {
    detail::require<ShapeError>(A.F.rows() == S.spec().n1 && A.G.rows() == S.spec().n2,
                                "sketch_matrix: factor matrices must have n1 and n2 rows");
    detail::require<ShapeError>(A.F.cols() == A.G.cols(), "sketch_matrix: F and G column counts differ");
    MatrixX<Scalar> out = (S.eta() * A.F).cwiseProduct(S.xi() * A.G) * S.scale();
    return out;
}

/// Assemble the column-wise Khatri-Rao product [F(:,j) (x) G(:,j)]_j.
template <class Scalar>
MatrixX<Scalar> assemble(const KroneckerColumns<Scalar>& A) {
    const Eigen::Index n1 = A.F.rows(), n2 = A.G.rows();
    MatrixX<Scalar> out(n1 * n2, A.F.cols());
    for (Eigen::Index j = 0; j < A.F.cols(); ++j)
        for (Eigen::Index i1 = 0; i1 < n1; ++i1) out.col(j).segment(i1 * n2, n2) = A.F(i1, j) * A.G.col(j);
    return out;
}

inline constexpr Eigen::Index kDefaultDensifyBudget = Eigen::Index(1) << 26;

/// Explicit m x (n1*n2) matrix; a test oracle for the factored form.
template <class Scalar>
MatrixX<Scalar> densify(const TensorSketch<Scalar>& S, Eigen::Index max_entries = kDefaultDensifyBudget) {
    const auto& spec = S.spec();
    if (spec.m > max_entries / (spec.n1 * spec.n2))
        throw ResourceError("densify: " + std::to_string(spec.m) + " x " + std::to_string(spec.n1 * spec.n2) +
                            " exceeds the entry budget");
    MatrixX<Scalar> D(spec.m, spec.n1 * spec.n2);
    for (Eigen::Index k = 0; k < spec.m; ++k)
        for (Eigen::Index i1 = 0; i1 < spec.n1; ++i1)
            D.row(k).segment(i1 * spec.n2, spec.n2) = (S.scale() * S.eta()(k, i1)) * S.xi().row(k);
    return D;
}

/// Realized M = max_k ||xi_k||_inf over the factor in the bounded role
/// (eta when the roles were swapped).
template <class Scalar>
Scalar max_xi_inf_norm(const TensorSketch<Scalar>& S) {
    const auto& F = S.swapped() ? S.eta() : S.xi();
    return F.size() == 0 ? Scalar(0) : F.cwiseAbs().maxCoeff();
}

}  // namespace tsketch
