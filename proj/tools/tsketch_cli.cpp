// Experiment runner for row-wise Kronecker sketching.
//
//   tsketch sweep-m --kinds well,ill,structured --m 50,100,200 --trials 10 --out fig1.csv
//   tsketch bound --rank 15 --epsilon 0.5 --delta 0.01 --q 0.2
//
// Exit codes: 0 success, 2 configuration error, 3 too many solver failures.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tsketch/geometry.hpp"
#include "tsketch/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct RunArgs {
    std::optional<Eigen::Index> n1, n2;
    std::vector<Eigen::Index> p, m;
    std::vector<double> q;
    std::optional<int> trials;
    std::optional<tsketch::Seed> seed;
    std::vector<std::string> dist, kinds;
    std::string out;
    unsigned threads = 0;
    double max_fail_frac = 0.0;
    bool summary = false;
    std::optional<Eigen::Index> sparsity, set_size, hw_n;
    std::optional<double> radius_scale, epsilon;
    std::string hw_matrix, hw_dist;
};

void add_run_options(CLI::App* sub, RunArgs& a) {
    sub->add_option("--n1", a.n1, "first factor length");
    sub->add_option("--n2", a.n2, "second factor length");
    sub->add_option("--p", a.p, "number of unknowns (comma list for sweep-p)")->delimiter(',');
    sub->add_option("--q", a.q, "density level (comma list for sweep-q)")->delimiter(',');
    sub->add_option("--m", a.m, "sketch size (comma list for m sweeps)")->delimiter(',');
    sub->add_option("--trials", a.trials, "independent trials per point");
    sub->add_option("--seed", a.seed, "base seed");
    sub->add_option("--dist", a.dist, "gr,gg,rr,dense-gaussian,dense-rademacher,identity")->delimiter(',');
    sub->add_option("--kinds", a.kinds, "well,ill,structured")->delimiter(',');
    sub->add_option("--out", a.out, "CSV output path (stdout when omitted)");
    sub->add_option("--threads", a.threads, "worker threads (falls back to TSKETCH_THREADS)");
    sub->add_option("--max-fail-frac", a.max_fail_frac, "tolerated fraction of non-converged solves");
    sub->add_flag("--summary", a.summary, "print per-point means to stderr");
    sub->add_option("--s", a.sparsity, "sparsity of the recovered signal");
    sub->add_option("--radius-scale", a.radius_scale, "l1 radius as a multiple of ||x_bar||_1");
    sub->add_option("--epsilon", a.epsilon, "recovery tolerance epsilon");
    sub->add_option("--set-size", a.set_size, "vectors in the embedding test set");
    sub->add_option("--hw-n", a.hw_n, "quadratic form dimension");
    sub->add_option("--hw-matrix", a.hw_matrix, "identity|psd")->check(CLI::IsMember({"identity", "psd"}));
    sub->add_option("--hw-dist", a.hw_dist, "gaussian|rademacher")->check(CLI::IsMember({"gaussian", "rademacher"}));
}

Eigen::Index single(const std::vector<Eigen::Index>& v, const char* flag) {
    if (v.size() != 1) throw tsketch::ConfigError(std::string(flag) + " takes a single value for this experiment");
    return v.front();
}

tsketch::ExperimentConfig build_config(tsketch::Experiment e, const RunArgs& a) {
    using namespace tsketch;
    ExperimentConfig c = default_config(e);
    if (a.n1) c.n1 = *a.n1;
    if (a.n2) c.n2 = *a.n2;
    if (e == Experiment::SparseRecoveryPhase) c.p = c.n1 * c.n2;
    if (!a.p.empty()) {
        if (e == Experiment::SweepP)
            c.p_values = a.p;
        else
            c.p = single(a.p, "--p");
    }
    if (!a.q.empty()) {
        if (e == Experiment::SweepQ) {
            c.q_values = a.q;
        } else {
            if (a.q.size() != 1) throw ConfigError("--q takes a single value for this experiment");
            c.q = a.q.front();
        }
    }
    if (!a.m.empty()) {
        if (e == Experiment::SweepP || e == Experiment::SweepQ)
            c.m = single(a.m, "--m");
        else
            c.m_values = a.m;
    }
    if (a.trials) c.trials = *a.trials;
    if (a.seed) c.base_seed = *a.seed;
    if (!a.dist.empty()) {
        c.dist_pairs.clear();
        for (const auto& d : a.dist) c.dist_pairs.push_back(parse_dist_pair(d));
    }
    if (!a.kinds.empty()) {
        c.problem_kinds.clear();
        for (const auto& k : a.kinds) {
            try {
                c.problem_kinds.push_back(parse_problem_kind(k));
            } catch (const ParameterError& err) {
                throw ConfigError(err.what());
            }
        }
    }
    if (a.sparsity) c.sparsity = *a.sparsity;
    if (a.radius_scale) c.radius_scale = *a.radius_scale;
    if (a.epsilon) c.epsilon = *a.epsilon;
    if (a.set_size) c.set_size = *a.set_size;
    if (a.hw_n) c.hw_n = *a.hw_n;
    if (a.hw_matrix == "psd") c.hw_kind = QuadraticFormKind::RandomPSD;
    if (a.hw_matrix == "identity") c.hw_kind = QuadraticFormKind::Identity;
    if (a.hw_dist == "rademacher") c.hw_dist = DistributionKind::Rademacher;
    if (a.hw_dist == "gaussian") c.hw_dist = DistributionKind::StandardGaussian;
    c.threads = a.threads;
    return c;
}

int run(tsketch::Experiment e, const RunArgs& a) {
    using namespace tsketch;
    ExperimentConfig config;
    try {
        config = build_config(e, a);
        validate(config);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitConfig;
    }
    const auto records = run_experiment(config);
    if (a.out.empty()) {
        write_csv(std::cout, records);
    } else {
        std::ofstream os(a.out);
        if (!os) {
            std::cerr << "cannot open " << a.out << '\n';
            return kExitConfig;
        }
        write_csv(os, records);
    }
    if (a.summary) {
        for (const auto& row : aggregate_mean(records, {"kind", "dist", "p", "m", "q"})) {
            for (const auto& [k, v] : row.key) std::cerr << k << '=' << v << ' ';
            std::cerr << "mean=" << row.mean << " median=" << row.median << " n=" << row.count << '\n';
        }
    }
    const double fail = nonconverged_fraction(records);
    if (fail > a.max_fail_frac) {
        std::cerr << "solver did not converge on " << fail * 100.0 << "% of runs\n";
        return kExitSolver;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace tsketch;
    CLI::App app{"Row-wise Kronecker sketching experiments"};
    app.require_subcommand(1);

    const std::vector<std::pair<Experiment, std::string>> experiments = {
        {Experiment::SweepM, "error ratio versus sketch size m"},
        {Experiment::SweepP, "error ratio versus number of unknowns p"},
        {Experiment::SweepQ, "error ratio versus density q"},
        {Experiment::BoundedVsUnbounded, "G+R, G+G, R+R and dense baselines versus m"},
        {Experiment::SparseRecoveryPhase, "l1-constrained recovery through a sketch versus m"},
        {Experiment::EmbeddingConcentration, "sup embedding error over a subspace sample versus m"},
        {Experiment::HansonWrightTail, "centered masked quadratic-form deviations versus m"},
    };
    std::vector<RunArgs> args(experiments.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < experiments.size(); ++i) {
        auto* sub = app.add_subcommand(std::string(to_string(experiments[i].first)), experiments[i].second);
        add_run_options(sub, args[i]);
        subs.push_back(sub);
    }

    std::optional<std::int64_t> rank, sparse;
    std::int64_t ambient = 0;
    double epsilon = 0.5, delta = 0.01, q = 1.0, C = 1.0;
    auto* bound = app.add_subcommand("bound", "sketch-size lower bound from a width estimate");
    auto* rank_opt = bound->add_option("--rank", rank, "subspace rank r (width 2 sqrt(r))");
    bound->add_option("--s", sparse, "sparsity s (l1 cone width)")->excludes(rank_opt);
    bound->add_option("--p", ambient, "ambient dimension p for the l1 cone");
    bound->add_option("--epsilon", epsilon, "target epsilon in (0,1)");
    bound->add_option("--delta", delta, "failure probability in (0,1/2)");
    bound->add_option("--q", q, "density level");
    bound->add_option("--C", C, "universal constant");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (bound->parsed()) {
            WidthEstimate w;
            if (rank)
                w = width_bound_rank(*rank);
            else if (sparse)
                w = width_bound_l1_cone(*sparse, ambient);
            else
                throw ConfigError("bound needs --rank or --s with --p");
            const auto b = sketch_dim_bound(w, epsilon, delta, q, C);
            std::printf("width=%.6g width_term=%.6g logdelta_term=%.6g m_lower=%lld\n", w.value, b.width_term,
                        b.logdelta_term, static_cast<long long>(b.m_lower));
            return 0;
        }
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) return run(experiments[i].first, args[i]);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitConfig;
    } catch (const ParameterError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
