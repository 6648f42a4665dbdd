#pragma once

#include <iosfwd>

#include "tsketch/sketch.hpp"

namespace tsketch {

/// Contents of a TSK1 dump: header (magic "TSK1", u64 m, n1, n2, f64 q, all
/// little-endian) followed by eta then xi as row-major f64.
struct SketchDump {
    Eigen::Index m = 0, n1 = 0, n2 = 0;
    double q = 1.0;
    RowMatrixX<double> eta;
    RowMatrixX<double> xi;
};

void write_sketch(std::ostream& os, const TensorSketch<double>& S);
SketchDump read_sketch(std::istream& is);

/// Rebuild an operator from a dump; the laws and seed are not part of the
/// format and must be supplied.
TensorSketch<double> to_sketch(const SketchDump& dump, const FactorDistribution& dist1,
                               const FactorDistribution& dist2, Seed seed = 0);

}  // namespace tsketch
