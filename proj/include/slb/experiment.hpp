#pragma once

#include <string>
#include <vector>

#include "slb/config.hpp"
#include "slb/diagnostics.hpp"
#include "slb/synthetic.hpp"

namespace slb {

struct ReplicateRecord {
    int n = 0;
    int rep = 0;
    bool failed = false;
    std::string error;

    double lambda_hat = 0.0;
    bool empty_grid = false;
    std::vector<double> grid;
    std::vector<double> member_set;
    std::vector<Comparison> comparisons;

    // exact errors per grid lambda (mercer estimation kernel only)
    bool has_exact_errors = false;
    std::vector<double> err_h, err_l2;
    double err_h_at_hat = 0.0, err_l2_at_hat = 0.0;
    double err_h_oracle = 0.0, err_l2_oracle = 0.0;     // grid-oracle minima
    double oracle_lambda_h = 0.0, oracle_lambda_l2 = 0.0;
    double ratio_h = 0.0, ratio_l2 = 0.0;               // e(lambda_hat)/min e

    double elapsed_ms = 0.0;  // excluded from the deterministic report surface
};

struct AggregateRow {
    int n = 0;
    int replicates = 0;
    int empty_grid_count = 0;
    int failure_count = 0;
    int usable = 0;  // completed with nonempty grid
    double med_err_h = 0.0, q25_err_h = 0.0, q75_err_h = 0.0;
    double med_err_l2 = 0.0, q25_err_l2 = 0.0, q75_err_l2 = 0.0;
    double med_ratio_h = 0.0, med_ratio_l2 = 0.0;
    double med_lambda_hat = 0.0;
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double std_error = 0.0;
    double r_squared = 0.0;
    int points = 0;
    std::vector<double> residuals;
};

/// Least-squares fit of y against x (both already on whatever scale the
/// caller wants); used for log-log rate regressions.
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct RunReport {
    ExperimentConfig config;  // resolved configuration (self-describing reports)
    double kappa_sq = 0.0;
    double sigma_bernstein = 0.0, m_bernstein = 0.0;  // after the positivity floor
    std::vector<ReplicateRecord> replicates;
    std::vector<AggregateRow> aggregates;
    bool has_exact_errors = false;
    SlopeFit slope_h, slope_l2;  // log median error vs log n over usable n
    double failure_fraction = 0.0;
    double total_elapsed_ms = 0.0;
};

/// Seeded Monte Carlo sweep over n_list x replicates. Any module error aborts
/// the replicate and is recorded; more than 5% failed replicates fails the run
/// (std::runtime_error).
RunReport run_experiment(const ExperimentConfig& config);

struct RateStudyResult {
    RunReport report;
    double predicted_exponent_h = 0.0;   // s = 0
    double predicted_exponent_l2 = 0.0;  // s = 1/2
    double fitted_exponent_h = 0.0;      // -slope
    double fitted_exponent_l2 = 0.0;
    bool conclusive = false;  // >= 3 usable n points after empty-grid exclusion
    bool pass_h = false, pass_l2 = false;
};

/// Rate regression against the predicted exponents; requires >= 4 distinct n
/// values and >= 50 replicates per n, a Holder target and a power-decay
/// spectrum. Fewer than 3 usable n points yields an inconclusive result, not
/// a failure.
RateStudyResult rate_study(const ExperimentConfig& config);

struct BaselineRow {
    int n = 0;
    double med_err_h_balancing = 0.0, med_err_l2_balancing = 0.0;
    double med_err_h_holdout = 0.0, med_err_l2_holdout = 0.0;
    double med_rkhs_ratio = 0.0;  // holdout / balancing
};

struct BaselineReplicate {
    int n = 0, rep = 0;
    bool failed = false;
    std::string error;
    double lambda_balancing = 0.0, lambda_holdout = 0.0;
    double err_h_balancing = 0.0, err_l2_balancing = 0.0;
    double err_h_holdout = 0.0, err_l2_holdout = 0.0;
};

struct BaselineReport {
    ExperimentConfig config;
    std::vector<BaselineReplicate> replicates;
    std::vector<BaselineRow> rows;
};

/// Hold-out comparison: each sample is split 50/50, the estimator family is
/// fitted on the first half, and lambda is chosen (a) by the balancing rule
/// and (b) by minimizing hold-out empirical prediction risk on the second
/// half; exact error norms of both choices are tabulated.
BaselineReport baseline_holdout(const ExperimentConfig& config);

struct DiagnosticsReport {
    std::vector<double> lambda_grid;
    std::vector<CoverageRow> coverage;
    PropertyCheckResult sublinear, cordes, zhou, interpolation, moment;
    double eta = 0.0;
    bool coverage_ok = false;
    bool deterministic_ok = false;
};

/// Coverage study on the deterministic population grid plus the deterministic
/// operator-inequality checks.
DiagnosticsReport run_diagnostics(const ExperimentConfig& config, int coverage_replicates = 400,
                                  int deterministic_trials = 500, int dim = 12);

}  // namespace slb
