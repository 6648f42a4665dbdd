#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "tsketch/error.hpp"
#include "tsketch/random.hpp"

namespace tsketch {

enum class DistributionKind { StandardGaussian, Rademacher };

/// Zero-mean, unit-variance sub-Gaussian law for the entries of one sketch factor.
///
/// `psi2_bound` is the Orlicz-2 norm inf{t > 0 : E exp(x^2/t^2) <= 2} of an
/// unmasked entry. The defaults are the exact values for the two built-in laws:
/// sqrt(8/3) for N(0,1) and 1/sqrt(log 2) for Rademacher.
struct FactorDistribution {
    DistributionKind kind = DistributionKind::StandardGaussian;
    double psi2_bound = std::sqrt(8.0 / 3.0);
    std::optional<double> entry_bound;

    static FactorDistribution gaussian(double psi2 = std::sqrt(8.0 / 3.0)) {
        detail::require<ParameterError>(psi2 >= 1.0, "psi2 bound must be >= 1 for a unit-variance law");
        return {DistributionKind::StandardGaussian, psi2, std::nullopt};
    }

    static FactorDistribution rademacher() {
        return {DistributionKind::Rademacher, 1.0 / std::sqrt(std::log(2.0)), 1.0};
    }

    bool bounded() const noexcept { return entry_bound.has_value(); }

    friend bool operator==(const FactorDistribution&, const FactorDistribution&) = default;
};

inline std::string_view to_string(DistributionKind kind) {
    return kind == DistributionKind::Rademacher ? "rademacher" : "gaussian";
}

inline FactorDistribution parse_distribution(std::string_view name) {
    if (name == "gaussian") return FactorDistribution::gaussian();
    if (name == "rademacher") return FactorDistribution::rademacher();
    throw ParameterError("unknown distribution '" + std::string(name) + "' (expected gaussian|rademacher)");
}

inline void check_density(double q) {
    detail::require<ParameterError>(q > 0.0 && q <= 1.0, "density q must lie in (0, 1]");
}

/// Upper bound on |entry| of a masked-and-rescaled factor, entry_bound / sqrt(q).
inline std::optional<double> effective_entry_bound(const FactorDistribution& dist, double q) {
    check_density(q);
    if (!dist.entry_bound) return std::nullopt;
    return *dist.entry_bound / std::sqrt(q);
}

/// Two independent streams feeding one factor: values and Bernoulli mask.
/// Value draws never depend on q, so masks at different densities share the
/// same underlying phi, and the uniform-threshold mask is nested in q.
struct FactorStream {
    Engine values;
    Engine mask;
    std::normal_distribution<double> normal{0.0, 1.0};

    explicit FactorStream(Seed seed)
        : values(make_engine(seed, {0})), mask(make_engine(seed, {1})) {}

    double draw(DistributionKind kind) {
        if (kind == DistributionKind::Rademacher) return (values() >> 63) ? 1.0 : -1.0;
        return normal(values);
    }

    bool keep(double q) { return q >= 1.0 ? (mask(), true) : uniform01(mask) < q; }
};

/// Fill `out` with (phi o sigma)/sqrt(q). Returns the number of surviving entries.
template <class Derived>
Eigen::Index sample_factor_into(const FactorDistribution& dist, double q, FactorStream& stream,
                                Eigen::DenseBase<Derived>& out) {
    using Scalar = typename Derived::Scalar;
    const double scale = 1.0 / std::sqrt(q);
    Eigen::Index nnz = 0;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double phi = stream.draw(dist.kind);
        if (stream.keep(q)) {
            out(i) = static_cast<Scalar>(phi * scale);
            ++nnz;
        } else {
            out(i) = Scalar(0);
        }
    }
    return nnz;
}

template <class Scalar = double>
struct MaskedFactorSample {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
    Eigen::Index nnz_count = 0;
    double q = 1.0;
};

template <class Scalar = double>
MaskedFactorSample<Scalar> sample_factor(const FactorDistribution& dist, Eigen::Index n, double q,
                                         FactorStream& stream) {
    detail::require<ParameterError>(n >= 1, "factor length must be >= 1");
    check_density(q);
    MaskedFactorSample<Scalar> s;
    s.q = q;
    s.values.resize(n);
    s.nnz_count = sample_factor_into(dist, q, stream, s.values);
    return s;
}

template <class Scalar = double>
MaskedFactorSample<Scalar> sample_factor(const FactorDistribution& dist, Eigen::Index n, double q,
                                         Seed seed) {
    FactorStream stream(seed);
    return sample_factor<Scalar>(dist, n, q, stream);
}

}  // namespace tsketch
