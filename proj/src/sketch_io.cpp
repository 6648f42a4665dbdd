#include "tsketch/sketch_io.hpp"

#include <istream>
#include <ostream>

#include "tsketch/binary_io.hpp"

namespace tsketch {

void write_sketch(std::ostream& os, const TensorSketch<double>& S) {
    const auto& spec = S.spec();
    binio::put_magic(os, "TSK1");
    binio::put_u64(os, static_cast<std::uint64_t>(spec.m));
    binio::put_u64(os, static_cast<std::uint64_t>(spec.n1));
    binio::put_u64(os, static_cast<std::uint64_t>(spec.n2));
    binio::put_f64(os, spec.q);
    binio::put_row_major(os, S.eta());
    binio::put_row_major(os, S.xi());
}

SketchDump read_sketch(std::istream& is) {
    binio::expect_magic(is, "TSK1");
    SketchDump d;
    d.m = binio::get_dim(is);
    d.n1 = binio::get_dim(is);
    d.n2 = binio::get_dim(is);
    d.q = binio::get_f64(is);
    binio::check_payload(double(d.m) * double(d.n1 + d.n2));
    d.eta.resize(d.m, d.n1);
    d.xi.resize(d.m, d.n2);
    binio::get_row_major(is, d.eta);
    binio::get_row_major(is, d.xi);
    return d;
}

TensorSketch<double> to_sketch(const SketchDump& dump, const FactorDistribution& dist1,
                               const FactorDistribution& dist2, Seed seed) {
    SketchSpec spec{dump.m, dump.n1, dump.n2, dump.q, dist1, dist2, seed};
    return TensorSketch<double>(spec, dump.eta, dump.xi);
}

}  // namespace tsketch
