#include "tsketch/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <thread>
#include <variant>

#include "tsketch/error.hpp"
#include "tsketch/sketch.hpp"
#include "tsketch/solvers.hpp"

namespace tsketch {

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::SweepM: return "sweep-m";
        case Experiment::SweepP: return "sweep-p";
        case Experiment::SweepQ: return "sweep-q";
        case Experiment::BoundedVsUnbounded: return "bounded";
        case Experiment::SparseRecoveryPhase: return "sparse-recovery";
        case Experiment::EmbeddingConcentration: return "embedding";
        case Experiment::HansonWrightTail: return "hw-tail";
    }
    return "?";
}

Experiment parse_experiment(std::string_view name) {
    for (auto e : {Experiment::SweepM, Experiment::SweepP, Experiment::SweepQ, Experiment::BoundedVsUnbounded,
                   Experiment::SparseRecoveryPhase, Experiment::EmbeddingConcentration, Experiment::HansonWrightTail})
        if (to_string(e) == name) return e;
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(DistPair d) {
    switch (d) {
        case DistPair::GR: return "gr";
        case DistPair::GG: return "gg";
        case DistPair::RR: return "rr";
        case DistPair::DenseGaussian: return "dense-gaussian";
        case DistPair::DenseRademacher: return "dense-rademacher";
        case DistPair::Identity: return "identity";
    }
    return "?";
}

DistPair parse_dist_pair(std::string_view name) {
    for (auto d : {DistPair::GR, DistPair::GG, DistPair::RR, DistPair::DenseGaussian, DistPair::DenseRademacher,
                   DistPair::Identity})
        if (to_string(d) == name) return d;
    throw ConfigError("unknown sketch family '" + std::string(name) + "'");
}

ExperimentConfig default_config(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    switch (e) {
        case Experiment::SweepM:
            c.m_values = {50, 100, 200, 400, 800, 1600};
            c.dist_pairs = {DistPair::GR, DistPair::DenseGaussian};
            break;
        case Experiment::SweepP:
            c.p_values = {5, 10, 15, 20, 30};
            c.dist_pairs = {DistPair::GR, DistPair::DenseGaussian};
            break;
        case Experiment::SweepQ:
            c.q_values = {0.05, 0.1, 0.2, 0.4, 0.6, 0.75};
            c.dist_pairs = {DistPair::GR, DistPair::DenseGaussian};
            break;
        case Experiment::BoundedVsUnbounded:
            c.problem_kinds = {ProblemKind::WellConditioned};
            c.m_values = {50, 100, 200, 400, 800, 1600};
            c.dist_pairs = {DistPair::GR, DistPair::GG, DistPair::RR, DistPair::DenseGaussian,
                            DistPair::DenseRademacher};
            break;
        case Experiment::SparseRecoveryPhase:
            c.problem_kinds = {ProblemKind::SparseRecovery};
            c.n1 = 16;
            c.n2 = 16;
            c.p = 256;
            c.q = 0.5;
            c.m_values = {40, 80, 160, 320};
            c.trials = 200;
            break;
        case Experiment::EmbeddingConcentration:
            c.problem_kinds = {ProblemKind::WellConditioned};
            c.m_values = {100, 200, 400, 800};
            break;
        case Experiment::HansonWrightTail:
            c.problem_kinds = {};
            c.q = 0.5;
            c.m_values = {50, 100, 200};
            c.trials = 10000;
            break;
    }
    return c;
}

namespace {

template <class T>
bool ascending_nonempty(const std::vector<T>& v) {
    return !v.empty() && std::is_sorted(v.begin(), v.end()) &&
           std::adjacent_find(v.begin(), v.end()) == v.end();
}

bool uses_m_sweep(Experiment e) {
    return e == Experiment::SweepM || e == Experiment::BoundedVsUnbounded || e == Experiment::SparseRecoveryPhase ||
           e == Experiment::EmbeddingConcentration || e == Experiment::HansonWrightTail;
}

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace

void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (c.trials < 1) fail("trials must be >= 1");
    if (c.n1 < 1 || c.n2 < 1) fail("n1 and n2 must be >= 1");
    if (!(c.q > 0.0 && c.q <= 1.0)) fail("q must lie in (0, 1]");
    if (c.m < 1) fail("m must be >= 1");
    if (c.dist_pairs.empty()) fail("at least one sketch family is required");
    if (uses_m_sweep(c.experiment)) {
        if (!ascending_nonempty(c.m_values)) fail("m values must be a nonempty strictly ascending list");
        if (c.m_values.front() < 1) fail("m values must be >= 1");
    }
    if (c.experiment == Experiment::SweepP) {
        if (!ascending_nonempty(c.p_values)) fail("p values must be a nonempty strictly ascending list");
        if (c.p_values.front() < 1) fail("p values must be >= 1");
    }
    if (c.experiment == Experiment::SweepQ) {
        if (!ascending_nonempty(c.q_values)) fail("q values must be a nonempty strictly ascending list");
        if (!(c.q_values.front() > 0.0 && c.q_values.back() <= 1.0)) fail("q values must lie in (0, 1]");
    }

    const Eigen::Index n = c.n1 * c.n2;
    switch (c.experiment) {
        case Experiment::SweepM:
        case Experiment::SweepP:
        case Experiment::SweepQ:
        case Experiment::BoundedVsUnbounded:
        case Experiment::EmbeddingConcentration: {
            if (c.problem_kinds.empty()) fail("at least one problem kind is required");
            const Eigen::Index pmax = c.experiment == Experiment::SweepP ? c.p_values.back() : c.p;
            const Eigen::Index pmin = c.experiment == Experiment::SweepP ? c.p_values.front() : c.p;
            if (pmin < 1) fail("p must be >= 1");
            if (pmax > n) fail("p = " + std::to_string(pmax) + " exceeds n1*n2 = " + std::to_string(n));
            for (auto k : c.problem_kinds) {
                if (k == ProblemKind::SparseRecovery) fail("sparse kind is only valid for sparse-recovery");
                if (k == ProblemKind::IllConditioned && pmin < 2) fail("ill-conditioned instances need p >= 2");
                if (k == ProblemKind::Structured && (c.n1 < pmax || c.n2 < pmax))
                    fail("structured instances need n1 >= p and n2 >= p");
            }
            if (c.experiment == Experiment::EmbeddingConcentration && c.set_size < 1) fail("set size must be >= 1");
            break;
        }
        case Experiment::SparseRecoveryPhase:
            if (c.sparsity < 1 || c.sparsity > n) fail("sparsity must satisfy 1 <= s <= n1*n2");
            if (!(c.radius_scale > 0.0)) fail("radius scale must be positive");
            if (!(c.epsilon > 0.0)) fail("epsilon must be positive");
            break;
        case Experiment::HansonWrightTail:
            if (c.hw_n < 1) fail("quadratic form size must be >= 1");
            break;
    }
    if (c.experiment != Experiment::HansonWrightTail) {
        for (auto d : c.dist_pairs)
            if (d == DistPair::Identity && c.experiment == Experiment::EmbeddingConcentration)
                fail("identity operator is not meaningful for embedding runs");
    }
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// A sampled operator from one of the curve families.
class Operator {
public:
    Operator(DistPair family, Eigen::Index m, Eigen::Index n1, Eigen::Index n2, double q, Seed seed) {
        switch (family) {
            case DistPair::GR:
            case DistPair::GG:
            case DistPair::RR: {
                SketchSpec spec;
                spec.m = m;
                spec.n1 = n1;
                spec.n2 = n2;
                spec.q = q;
                spec.dist1 = family == DistPair::RR ? FactorDistribution::rademacher() : FactorDistribution::gaussian();
                spec.dist2 = family == DistPair::GG ? FactorDistribution::gaussian() : FactorDistribution::rademacher();
                spec.seed = seed;
                op_ = sample_sketch<double>(spec);
                break;
            }
            case DistPair::DenseGaussian:
            case DistPair::DenseRademacher: {
                Engine eng = make_engine(seed);
                std::normal_distribution<double> nd;
                const double scale = 1.0 / std::sqrt(static_cast<double>(m));
                Eigen::MatrixXd D(m, n1 * n2);
                const bool gauss = family == DistPair::DenseGaussian;
                for (Eigen::Index j = 0; j < D.cols(); ++j)
                    for (Eigen::Index i = 0; i < m; ++i)
                        D(i, j) = scale * (gauss ? nd(eng) : ((eng() >> 63) ? 1.0 : -1.0));
                op_ = std::move(D);
                break;
            }
            case DistPair::Identity: op_ = std::monostate{}; break;
        }
    }

    Eigen::MatrixXd apply(const ProblemInstance& inst) const {
        if (auto* s = std::get_if<TensorSketch<double>>(&op_)) return sketch_matrix(*s, inst);
        return apply(inst.A);
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& A) const {
        if (auto* s = std::get_if<TensorSketch<double>>(&op_)) return sketch_matrix(*s, A);
        if (auto* d = std::get_if<Eigen::MatrixXd>(&op_)) return *d * A;
        return A;
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& y) const {
        if (auto* s = std::get_if<TensorSketch<double>>(&op_)) return tsketch::apply(*s, y);
        if (auto* d = std::get_if<Eigen::MatrixXd>(&op_)) return *d * y;
        return y;
    }

private:
    std::variant<std::monostate, TensorSketch<double>, Eigen::MatrixXd> op_;
};

enum : std::uint64_t { kProblemTag = 0x70726f62, kSketchTag = 0x736b6574, kSetTag = 0x73657421, kHwTag = 0x68777461 };

struct Tagged {
    std::array<std::int64_t, 4> key{};  // kind, family, point, trial
    ResultRecord rec;
};

using Unit = std::function<std::vector<Tagged>()>;

std::vector<Tagged> run_units(const std::vector<Unit>& units, unsigned threads) {
    std::vector<std::vector<Tagged>> out(units.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(units.size());
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < units.size();) {
            try {
                out[i] = units[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(units.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<Tagged> all;
    for (auto& v : out) std::move(v.begin(), v.end(), std::back_inserter(all));
    std::stable_sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.key < b.key; });
    return all;
}

ResultRecord base_record(const ExperimentConfig& c, std::string_view kind, DistPair d) {
    ResultRecord r;
    r.experiment = std::string(to_string(c.experiment));
    r.kind = std::string(kind);
    r.dist = std::string(to_string(d));
    r.n1 = c.n1;
    r.n2 = c.n2;
    return r;
}

struct SketchPoint {
    Eigen::Index m;
    double q;
};

std::vector<Unit> regression_units(const ExperimentConfig& c) {
    std::vector<Eigen::Index> problem_ps =
        c.experiment == Experiment::SweepP ? c.p_values : std::vector<Eigen::Index>{c.p};
    std::vector<SketchPoint> points;
    if (c.experiment == Experiment::SweepQ)
        for (double q : c.q_values) points.push_back({c.m, q});
    else if (c.experiment == Experiment::SweepP)
        points.push_back({c.m, c.q});
    else
        for (auto m : c.m_values) points.push_back({m, c.q});

    std::vector<Unit> units;
    for (std::size_t ki = 0; ki < c.problem_kinds.size(); ++ki) {
        for (std::size_t pi = 0; pi < problem_ps.size(); ++pi) {
            for (int trial = 0; trial < c.trials; ++trial) {
                units.push_back([&c, ki, pi, trial, p = problem_ps[pi], points] {
                    const ProblemKind kind = c.problem_kinds[ki];
                    const Seed pseed = derive_seed(c.base_seed, {kProblemTag, static_cast<std::uint64_t>(kind),
                                                                 static_cast<std::uint64_t>(c.n1),
                                                                 static_cast<std::uint64_t>(c.n2),
                                                                 static_cast<std::uint64_t>(p),
                                                                 static_cast<std::uint64_t>(trial)});
                    const ProblemInstance inst = generate(kind, c.n1, c.n2, p, pseed);
                    const auto star = solve_unconstrained(inst.A, inst.b);
                    std::vector<Tagged> recs;
                    for (std::size_t si = 0; si < points.size(); ++si) {
                        for (std::size_t di = 0; di < c.dist_pairs.size(); ++di) {
                            const DistPair d = c.dist_pairs[di];
                            const auto [m, q] = points[si];
                            const Seed sseed = derive_seed(
                                c.base_seed, {kSketchTag, static_cast<std::uint64_t>(c.experiment),
                                              static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(d),
                                              static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(p), bits(q),
                                              static_cast<std::uint64_t>(trial)});
                            const auto t0 = Clock::now();
                            const Operator S(d, m, c.n1, c.n2, q, sseed);
                            const Eigen::MatrixXd SA = S.apply(inst);
                            const Eigen::VectorXd Sb = S.apply(inst.b);
                            const auto hat = solve_unconstrained(SA, Sb);
                            const double ratio = error_ratio_from_residuals(
                                (inst.A * hat.x - inst.b).squaredNorm(), star.residual_sq);
                            ResultRecord r = base_record(c, to_string(kind), d);
                            r.p = p;
                            r.m = m;
                            r.q = q;
                            r.trial = trial;
                            r.seed = sseed;
                            r.error_ratio = ratio;
                            r.iters = hat.iterations;
                            r.converged = hat.converged;
                            r.wall_ms = elapsed_ms(t0);
                            const auto point = static_cast<std::int64_t>(c.experiment == Experiment::SweepP ? pi : si);
                            recs.push_back({{static_cast<std::int64_t>(ki), static_cast<std::int64_t>(di), point, trial},
                                            std::move(r)});
                        }
                    }
                    return recs;
                });
            }
        }
    }
    return units;
}

std::vector<Unit> sparse_recovery_units(const ExperimentConfig& c) {
    std::vector<Unit> units;
    for (int trial = 0; trial < c.trials; ++trial) {
        units.push_back([&c, trial] {
            const Seed pseed =
                derive_seed(c.base_seed, {kProblemTag, static_cast<std::uint64_t>(ProblemKind::SparseRecovery),
                                          static_cast<std::uint64_t>(c.n1), static_cast<std::uint64_t>(c.n2),
                                          static_cast<std::uint64_t>(c.sparsity), static_cast<std::uint64_t>(trial)});
            const ProblemInstance inst = gen_sparse_recovery(c.n1, c.n2, c.sparsity, pseed);
            const Eigen::VectorXd& truth = inst.sparse_truth->signal;
            const double R = c.radius_scale * truth.lpNorm<1>();
            const Eigen::VectorXd x_star = hard_threshold(project_l1(truth, R));
            const double floor = kRecoveryFloor * truth.squaredNorm();
            const double denom = std::max((x_star - truth).squaredNorm(), floor);
            L1SolverOptions opts;
            opts.radius = R;
            std::vector<Tagged> recs;
            for (std::size_t si = 0; si < c.m_values.size(); ++si) {
                for (std::size_t di = 0; di < c.dist_pairs.size(); ++di) {
                    const DistPair d = c.dist_pairs[di];
                    const Eigen::Index m = c.m_values[si];
                    const Seed sseed = derive_seed(
                        c.base_seed, {kSketchTag, static_cast<std::uint64_t>(c.experiment),
                                      static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(m), bits(c.q),
                                      static_cast<std::uint64_t>(trial)});
                    const auto t0 = Clock::now();
                    const Operator S(d, m, c.n1, c.n2, c.q, sseed);
                    const Eigen::MatrixXd SA = S.apply(inst.A);
                    const Eigen::VectorXd Sb = S.apply(inst.b);
                    const auto hat = solve_l1_constrained(SA, Sb, opts);
                    ResultRecord r = base_record(c, to_string(ProblemKind::SparseRecovery), d);
                    r.p = inst.p;
                    r.m = m;
                    r.q = c.q;
                    r.trial = trial;
                    r.seed = sseed;
                    r.error_ratio = (hat.x - truth).squaredNorm() / denom;
                    r.iters = hat.iterations;
                    r.converged = hat.converged;
                    r.wall_ms = elapsed_ms(t0);
                    recs.push_back({{0, static_cast<std::int64_t>(di), static_cast<std::int64_t>(si), trial}, std::move(r)});
                }
            }
            return recs;
        });
    }
    return units;
}

std::vector<Unit> embedding_units(const ExperimentConfig& c) {
    std::vector<Unit> units;
    for (std::size_t ki = 0; ki < c.problem_kinds.size(); ++ki) {
        const ProblemKind kind = c.problem_kinds[ki];
        // one fixed set per kind, shared across trials
        const Seed pseed = derive_seed(c.base_seed, {kProblemTag, static_cast<std::uint64_t>(kind),
                                                     static_cast<std::uint64_t>(c.n1), static_cast<std::uint64_t>(c.n2),
                                                     static_cast<std::uint64_t>(c.p)});
        auto set = std::make_shared<SubspaceSample>(sample_unit_sphere_subspace(
            generate(kind, c.n1, c.n2, c.p, pseed).A, c.set_size, derive_seed(c.base_seed, {kSetTag})));
        for (int trial = 0; trial < c.trials; ++trial) {
            units.push_back([&c, ki, kind, trial, set] {
                std::vector<Tagged> recs;
                for (std::size_t si = 0; si < c.m_values.size(); ++si) {
                    for (std::size_t di = 0; di < c.dist_pairs.size(); ++di) {
                        const DistPair d = c.dist_pairs[di];
                        const Eigen::Index m = c.m_values[si];
                        const Seed sseed = derive_seed(
                            c.base_seed, {kSketchTag, static_cast<std::uint64_t>(c.experiment),
                                          static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(d),
                                          static_cast<std::uint64_t>(m), bits(c.q), static_cast<std::uint64_t>(trial)});
                        const auto t0 = Clock::now();
                        const Operator S(d, m, c.n1, c.n2, c.q, sseed);
                        const Eigen::MatrixXd SY = S.apply(set->basis) * set->coeffs;
                        ResultRecord r = base_record(c, "subspace", d);
                        r.p = set->basis.cols();
                        r.m = m;
                        r.q = c.q;
                        r.trial = trial;
                        r.seed = sseed;
                        r.error_ratio = sup_embedding_error(SY);
                        r.wall_ms = elapsed_ms(t0);
                        recs.push_back({{static_cast<std::int64_t>(ki), static_cast<std::int64_t>(di),
                                         static_cast<std::int64_t>(si), trial},
                                        std::move(r)});
                    }
                }
                return recs;
            });
        }
    }
    return units;
}

std::vector<Unit> hanson_wright_units(const ExperimentConfig& c) {
    std::vector<Unit> units;
    for (std::size_t si = 0; si < c.m_values.size(); ++si) {
        units.push_back([&c, si] {
            const Eigen::Index m = c.m_values[si];
            const Seed seed = derive_seed(c.base_seed, {kHwTag, static_cast<std::uint64_t>(m), bits(c.q)});
            const FactorDistribution dist = c.hw_dist == DistributionKind::Rademacher ? FactorDistribution::rademacher()
                                                                                     : FactorDistribution::gaussian();
            const auto t0 = Clock::now();
            const auto dev = hanson_wright_deviations(c.hw_n, m, c.q, c.hw_kind, c.trials, seed, dist);
            const double per_trial = elapsed_ms(t0) / static_cast<double>(c.trials);
            std::vector<Tagged> recs;
            recs.reserve(dev.size());
            for (int t = 0; t < c.trials; ++t) {
                ResultRecord r;
                r.experiment = std::string(to_string(c.experiment));
                r.kind = c.hw_kind == QuadraticFormKind::Identity ? "identity" : "psd";
                r.dist = std::string(to_string(dist.kind));
                r.n1 = c.hw_n;
                r.n2 = 1;
                r.p = 0;
                r.m = m;
                r.q = c.q;
                r.trial = t;
                r.seed = seed;
                r.error_ratio = dev[static_cast<std::size_t>(t)];
                r.wall_ms = per_trial;
                recs.push_back({{0, 0, static_cast<std::int64_t>(si), t}, std::move(r)});
            }
            return recs;
        });
    }
    return units;
}

}  // namespace

std::vector<ResultRecord> run_experiment(const ExperimentConfig& config) {
    validate(config);
    std::vector<Unit> units;
    switch (config.experiment) {
        case Experiment::SweepM:
        case Experiment::SweepP:
        case Experiment::SweepQ:
        case Experiment::BoundedVsUnbounded: units = regression_units(config); break;
        case Experiment::SparseRecoveryPhase: units = sparse_recovery_units(config); break;
        case Experiment::EmbeddingConcentration: units = embedding_units(config); break;
        case Experiment::HansonWrightTail: units = hanson_wright_units(config); break;
    }
    auto tagged = run_units(units, resolve_threads(config.threads));
    std::vector<ResultRecord> out;
    out.reserve(tagged.size());
    for (auto& t : tagged) out.push_back(std::move(t.rec));
    return out;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string field_value(const ResultRecord& r, std::string_view field) {
    if (field == "experiment") return r.experiment;
    if (field == "kind") return r.kind;
    if (field == "dist") return r.dist;
    if (field == "n1") return std::to_string(r.n1);
    if (field == "n2") return std::to_string(r.n2);
    if (field == "p") return std::to_string(r.p);
    if (field == "m") return std::to_string(r.m);
    if (field == "q") return format_double(r.q);
    if (field == "trial") return std::to_string(r.trial);
    if (field == "seed") return std::to_string(r.seed);
    if (field == "error_ratio") return format_double(r.error_ratio);
    if (field == "iters") return std::to_string(r.iters);
    if (field == "converged") return r.converged ? "1" : "0";
    if (field == "wall_ms") return format_double(r.wall_ms);
    throw ParameterError("unknown record field '" + std::string(field) + "'");
}

void write_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
    os << kCsvHeader << '\n';
    for (const auto& r : records) {
        os << r.experiment << ',' << r.kind << ',' << r.dist << ',' << r.n1 << ',' << r.n2 << ',' << r.p << ','
           << r.m << ',' << format_double(r.q) << ',' << r.trial << ',' << r.seed << ','
           << format_double(r.error_ratio) << ',' << r.iters << ',' << (r.converged ? 1 : 0) << ','
           << format_double(r.wall_ms) << '\n';
    }
}

const std::string& AggregateRow::get(std::string_view field) const {
    for (const auto& [k, v] : key)
        if (k == field) return v;
    throw ParameterError("aggregate row has no key '" + std::string(field) + "'");
}

double AggregateRow::x(std::string_view field) const { return std::stod(get(field)); }

std::vector<AggregateRow> aggregate_mean(const std::vector<ResultRecord>& records,
                                         const std::vector<std::string>& group_keys) {
    detail::require<ParameterError>(!records.empty(), "aggregate_mean: no records");
    std::map<std::vector<std::string>, std::size_t> index;
    std::vector<std::vector<std::string>> order;
    std::vector<std::vector<double>> values;
    for (const auto& r : records) {
        std::vector<std::string> key;
        key.reserve(group_keys.size());
        for (const auto& g : group_keys) key.push_back(field_value(r, g));
        auto [it, inserted] = index.emplace(key, order.size());
        if (inserted) {
            order.push_back(key);
            values.emplace_back();
        }
        values[it->second].push_back(r.error_ratio);
    }
    std::vector<AggregateRow> rows;
    for (std::size_t i = 0; i < order.size(); ++i) {
        AggregateRow row;
        for (std::size_t g = 0; g < group_keys.size(); ++g) row.key.emplace_back(group_keys[g], order[i][g]);
        auto& v = values[i];
        row.count = v.size();
        double sum = 0.0;
        for (double x : v) sum += x;
        row.mean = sum / static_cast<double>(v.size());
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        row.median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
        rows.push_back(std::move(row));
    }
    return rows;
}

LoglogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require<ShapeError>(x.size() == y.size(), "fit_loglog: x and y lengths differ");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    detail::require<ParameterError>(lx.size() >= 2, "fit_loglog: fewer than two usable points");
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    detail::require<ParameterError>(sxx > 0.0, "fit_loglog: x values are all equal");
    LoglogFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.points = lx.size();
    return f;
}

LoglogFit fit_loglog_slope(const std::vector<AggregateRow>& rows, std::string_view x_field, double x_lo, double x_hi) {
    std::vector<double> x, y;
    for (const auto& r : rows) {
        const double xv = r.x(x_field);
        if (xv >= x_lo && xv <= x_hi) {
            x.push_back(xv);
            y.push_back(r.mean);
        }
    }
    return fit_loglog(x, y);
}

double nonconverged_fraction(const std::vector<ResultRecord>& records) {
    if (records.empty()) return 0.0;
    const auto bad = std::count_if(records.begin(), records.end(), [](const ResultRecord& r) { return !r.converged; });
    return static_cast<double>(bad) / static_cast<double>(records.size());
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TSKETCH_THREADS")) {
        unsigned v = 0;
        const std::string_view s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
    }
    return 1;
}

}  // namespace tsketch
