// Command-line front end: run experiments, rate studies, diagnostics,
// filter-constant verification and the hold-out baseline from INI configs.
// Exit codes: 0 success, 2 property failure, 3 configuration error.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "slb/experiment.hpp"
#include "slb/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 2;
constexpr int kExitConfigError = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string constant_mode;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config = true) {
    if (needs_config) cmd->add_option("config", o.config_path, "experiment config (INI)")->required();
    cmd->add_option("--out-dir", o.out_dir, "output directory for reports");
    cmd->add_option("--constant-mode", o.constant_mode, "theory | scaled:<c>");
    cmd->add_option("--seed", o.seed, "override master seed")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
}

slb::ExperimentConfig load_config(const CommonOpts& o) {
    slb::ExperimentConfig cfg = slb::ExperimentConfig::from_file(o.config_path);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (!o.constant_mode.empty()) cfg.set_constant_mode(o.constant_mode);
    if (o.seed_set) cfg.seed = o.seed;
    if (o.threads >= 0) cfg.threads = o.threads;
    if (cfg.out_dir.empty()) cfg.out_dir = "out";
    cfg.validate();
    return cfg;
}

int cmd_run(const CommonOpts& o) {
    const slb::ExperimentConfig cfg = load_config(o);
    const slb::RunReport report = slb::run_experiment(cfg);
    slb::write_run_report(report, cfg.out_dir);
    for (const slb::AggregateRow& a : report.aggregates)
        std::printf("n=%-6d usable=%d/%d empty=%d  med_err_H=%-12.5g med_err_L2=%-12.5g med_lambda_hat=%.5g\n",
                    a.n, a.usable, a.replicates, a.empty_grid_count, a.med_err_h, a.med_err_l2,
                    a.med_lambda_hat);
    if (report.has_exact_errors)
        std::printf("slopes: RKHS %.4f  L2 %.4f  (report in %s)\n", report.slope_h.slope,
                    report.slope_l2.slope, cfg.out_dir.c_str());
    return kExitOk;
}

int cmd_rates(const CommonOpts& o) {
    const slb::ExperimentConfig cfg = load_config(o);
    const slb::RateStudyResult res = slb::rate_study(cfg);
    slb::write_rate_study(res, cfg.out_dir);
    if (!res.conclusive) {
        std::printf("rate study inconclusive: fewer than 3 usable sample sizes\n");
        return kExitOk;
    }
    std::printf("RKHS exponent: fitted %.4f vs predicted %.4f -> %s\n", res.fitted_exponent_h,
                res.predicted_exponent_h, res.pass_h ? "pass" : "FAIL");
    std::printf("L2   exponent: fitted %.4f vs predicted %.4f -> %s\n", res.fitted_exponent_l2,
                res.predicted_exponent_l2, res.pass_l2 ? "pass" : "FAIL");
    return (res.pass_h && res.pass_l2) ? kExitOk : kExitPropertyFailure;
}

int cmd_diagnostics(const CommonOpts& o) {
    const slb::ExperimentConfig cfg = load_config(o);
    const slb::DiagnosticsReport rep = slb::run_diagnostics(cfg);
    slb::write_diagnostics_report(rep, cfg, cfg.out_dir);
    std::printf("coverage: %s (eta=%.3g, %zu lambdas)\n", rep.coverage_ok ? "ok" : "FAIL", rep.eta,
                rep.lambda_grid.size());
    std::printf("deterministic checks: %s (max violations: sublinear %.3g, cordes %.3g, zhou %.3g, "
                "interpolation %.3g, moment %.3g)\n",
                rep.deterministic_ok ? "ok" : "FAIL", rep.sublinear.max_violation,
                rep.cordes.max_violation, rep.zhou.max_violation, rep.interpolation.max_violation,
                rep.moment.max_violation);
    return (rep.coverage_ok && rep.deterministic_ok) ? kExitOk : kExitPropertyFailure;
}

int cmd_verify_filters() {
    const double kappas[] = {1.0, 2.5};
    bool ok = true;
    for (double k2 : kappas) {
        const slb::FilterFamily filters[] = {
            slb::FilterFamily::tikhonov(), slb::FilterFamily::iterated_tikhonov(2),
            slb::FilterFamily::spectral_cutoff(), slb::FilterFamily::landweber(k2, 1.0)};
        for (const slb::FilterFamily& f : filters) {
            try {
                const slb::FilterConstantsReport rep = slb::verify_filter_constants(f, k2);
                std::printf("%-24s kappa^2=%-4g max lam|g|=%.6f (<=%g)  max|r|=%.6f (<=%g)  "
                            "max qual=%.6f (<=%g)\n",
                            f.name().c_str(), k2, rep.max_lambda_g, f.gamma_minus1(),
                            rep.max_residual, f.gamma_0(), rep.max_qualification, f.gamma_psi());
            } catch (const std::exception& e) {
                std::printf("%-24s kappa^2=%-4g VIOLATION: %s\n", f.name().c_str(), k2, e.what());
                ok = false;
            }
        }
    }
    return ok ? kExitOk : kExitPropertyFailure;
}

int cmd_baseline(const CommonOpts& o) {
    const slb::ExperimentConfig cfg = load_config(o);
    const slb::BaselineReport rep = slb::baseline_holdout(cfg);
    slb::write_baseline_report(rep, cfg.out_dir);
    for (const slb::BaselineRow& row : rep.rows)
        std::printf("n=%-6d balancing: H=%-10.5g L2=%-10.5g | holdout: H=%-10.5g L2=%-10.5g | "
                    "RKHS ratio %.3f\n",
                    row.n, row.med_err_h_balancing, row.med_err_l2_balancing, row.med_err_h_holdout,
                    row.med_err_l2_holdout, row.med_rkhs_ratio);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral-filter kernel regression with data-driven balancing"};
    app.require_subcommand(1);

    CommonOpts run_o, rates_o, diag_o, base_o;
    CLI::App* run = app.add_subcommand("run", "Monte Carlo experiment from a config file");
    add_common(run, run_o);
    CLI::App* rates = app.add_subcommand("rates", "rate study with slope regression");
    add_common(rates, rates_o);
    CLI::App* diag = app.add_subcommand("diagnostics", "deviation coverage and operator inequalities");
    add_common(diag, diag_o);
    app.add_subcommand("verify-filters", "re-verify declared filter constants");
    CLI::App* base = app.add_subcommand("baseline", "hold-out comparison");
    add_common(base, base_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (run->parsed()) return cmd_run(run_o);
        if (rates->parsed()) return cmd_rates(rates_o);
        if (diag->parsed()) return cmd_diagnostics(diag_o);
        if (app.get_subcommand("verify-filters")->parsed()) return cmd_verify_filters();
        if (base->parsed()) return cmd_baseline(base_o);
    } catch (const slb::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::logic_error& e) {
        std::fprintf(stderr, "property failure: %s\n", e.what());
        return kExitPropertyFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitPropertyFailure;
    }
    return kExitOk;
}
