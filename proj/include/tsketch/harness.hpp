#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsketch/concentration.hpp"
#include "tsketch/distributions.hpp"
#include "tsketch/problems.hpp"
#include "tsketch/random.hpp"

namespace tsketch {

enum class Experiment {
    SweepM,
    SweepP,
    SweepQ,
    BoundedVsUnbounded,
    SparseRecoveryPhase,
    EmbeddingConcentration,
    HansonWrightTail,
};

/// Sketch family used for one curve. The dense and identity entries are
/// comparison operators built in the harness, not tensor sketches.
enum class DistPair { GR, GG, RR, DenseGaussian, DenseRademacher, Identity };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);
std::string_view to_string(DistPair d);
/// "gr" | "gg" | "rr" | "dense-gaussian" | "dense-rademacher" | "identity"
DistPair parse_dist_pair(std::string_view name);

struct ExperimentConfig {
    Experiment experiment = Experiment::SweepM;
    std::vector<ProblemKind> problem_kinds{ProblemKind::WellConditioned, ProblemKind::IllConditioned,
                                           ProblemKind::Structured};
    Eigen::Index n1 = 64;
    Eigen::Index n2 = 64;
    Eigen::Index p = 15;
    std::vector<Eigen::Index> m_values;
    std::vector<Eigen::Index> p_values;
    std::vector<double> q_values;
    Eigen::Index m = 400;  // fixed sketch size for the p and q sweeps
    double q = 0.2;        // fixed density for the other sweeps
    std::vector<DistPair> dist_pairs{DistPair::GR};
    int trials = 100;
    Seed base_seed = 0;

    // sparse recovery
    Eigen::Index sparsity = 5;
    double radius_scale = 1.0;  // R = radius_scale * ||x_bar||_1
    double epsilon = 0.5;       // success iff ||x_hat - x_bar||^2 <= (1+eps)^2 ||x* - x_bar||^2

    // embedding concentration
    Eigen::Index set_size = 1000;

    // Hanson-Wright tail
    Eigen::Index hw_n = 16;
    QuadraticFormKind hw_kind = QuadraticFormKind::Identity;
    DistributionKind hw_dist = DistributionKind::StandardGaussian;

    unsigned threads = 0;  // 0 defers to TSKETCH_THREADS, then 1
};

/// Defaults for each experiment: the figure grids (n1 = n2 = 64, p = 15,
/// m = 400, q = 0.2) with our choice of sweep points.
ExperimentConfig default_config(Experiment e);

/// Throws ConfigError on an infeasible configuration.
void validate(const ExperimentConfig& config);

struct ResultRecord {
    std::string experiment;
    std::string kind;
    std::string dist;
    Eigen::Index n1 = 0, n2 = 0, p = 0, m = 0;
    double q = 0.0;
    int trial = 0;
    Seed seed = 0;
    double error_ratio = 0.0;
    int iters = 0;
    bool converged = true;
    double wall_ms = 0.0;
};

inline constexpr std::string_view kCsvHeader =
    "experiment,kind,dist,n1,n2,p,m,q,trial,seed,error_ratio,iters,converged,wall_ms";

/// One record per (parameter point, curve, trial), in a schedule-independent order.
///
/// The error_ratio column carries the experiment's measured quantity: the
/// prediction error ratio for the regression sweeps; the squared recovery
/// distance ratio ||x_hat - x_bar||^2 / max(||x* - x_bar||^2, 1e-8 ||x_bar||^2)
/// for sparse recovery; the sup embedding error for the concentration runs;
/// and the centered quadratic-form deviation for the Hanson-Wright runs.
std::vector<ResultRecord> run_experiment(const ExperimentConfig& config);

/// Floor used in the sparse-recovery distance ratio, relative to ||x_bar||^2.
inline constexpr double kRecoveryFloor = 1e-8;

void write_csv(std::ostream& os, const std::vector<ResultRecord>& records);
std::string format_double(double v);

/// Field accessor by CSV column name.
std::string field_value(const ResultRecord& r, std::string_view field);

struct AggregateRow {
    std::vector<std::pair<std::string, std::string>> key;
    double mean = 0.0;
    double median = 0.0;
    std::size_t count = 0;

    const std::string& get(std::string_view field) const;
    double x(std::string_view field) const;
};

/// Mean, median and count of error_ratio per group, groups in first-seen order.
std::vector<AggregateRow> aggregate_mean(const std::vector<ResultRecord>& records,
                                         const std::vector<std::string>& group_keys);

struct LoglogFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};

/// OLS of log(mean) on log(x) over rows with x in [x_lo, x_hi], x > 0 and mean > 0.
LoglogFit fit_loglog_slope(const std::vector<AggregateRow>& rows, std::string_view x_field, double x_lo, double x_hi);

/// Plain OLS on log-log data, shared by the aggregate fit.
LoglogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Fraction of records with converged == false.
double nonconverged_fraction(const std::vector<ResultRecord>& records);

/// Worker count: explicit value if nonzero, else TSKETCH_THREADS, else 1.
unsigned resolve_threads(unsigned requested);

}  // namespace tsketch
