#include "slb/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace slb {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file " + name + " under " + dir);
    return out;
}

json config_json(const ExperimentConfig& c) {
    json j;
    j["model"] = {{"kind", c.kernel_kind},
                  {"dimension", c.dimension},
                  {"b", c.b},
                  {"mu_scale", c.mu_scale},
                  {"basis_offset", c.basis_offset},
                  {"gaussian_width", c.gaussian_width}};
    j["target"] = {{"r", c.r}, {"h_decay", c.h_decay}, {"h_norm", c.h_norm}};
    if (c.h_sign_seed) j["target"]["h_sign_seed"] = *c.h_sign_seed;
    j["noise"] = {{"kind", c.noise_kind}, {"scale", c.noise_scale}};
    j["filter"] = {{"kind", c.filter_kind}, {"m", c.iterated_m}, {"p", c.landweber_p}};
    j["experiment"] = {{"n", c.n_list},
                       {"replicates", c.replicates},
                       {"q", c.q},
                       {"eta", c.eta_sqrt_n ? json("sqrt_n") : json(c.eta)},
                       {"constant_mode", c.constant_mode_text()},
                       {"seed", c.seed},
                       {"slope_tolerance", c.slope_tolerance}};
    return j;
}

json slope_json(const SlopeFit& f) {
    return {{"slope", f.slope},     {"intercept", f.intercept}, {"std_error", f.std_error},
            {"r_squared", f.r_squared}, {"points", f.points},  {"residuals", f.residuals}};
}

json aggregates_json(const RunReport& r) {
    json rows = json::array();
    for (const AggregateRow& a : r.aggregates) {
        rows.push_back({{"n", a.n},
                        {"replicates", a.replicates},
                        {"empty_grid_count", a.empty_grid_count},
                        {"failure_count", a.failure_count},
                        {"usable", a.usable},
                        {"med_err_h", a.med_err_h},
                        {"q25_err_h", a.q25_err_h},
                        {"q75_err_h", a.q75_err_h},
                        {"med_err_l2", a.med_err_l2},
                        {"q25_err_l2", a.q25_err_l2},
                        {"q75_err_l2", a.q75_err_l2},
                        {"med_ratio_h", a.med_ratio_h},
                        {"med_ratio_l2", a.med_ratio_l2},
                        {"med_lambda_hat", a.med_lambda_hat}});
    }
    return rows;
}

void write_summary(const RunReport& r, const std::string& dir, json extra = json::object()) {
    json j;
    j["config"] = config_json(r.config);
    j["kappa_sq"] = r.kappa_sq;
    j["sigma_bernstein"] = r.sigma_bernstein;
    j["m_bernstein"] = r.m_bernstein;
    j["has_exact_errors"] = r.has_exact_errors;
    j["failure_fraction"] = r.failure_fraction;
    j["aggregates"] = aggregates_json(r);
    if (r.has_exact_errors) {
        j["slope_h"] = slope_json(r.slope_h);
        j["slope_l2"] = slope_json(r.slope_l2);
    }
    for (auto& [k, v] : extra.items()) j[k] = v;
    auto out = open_out(dir, "summary.json");
    out << j.dump(2) << "\n";
}

void write_timings(const RunReport& r, const std::string& dir) {
    json j;
    j["total_elapsed_ms"] = r.total_elapsed_ms;
    json per = json::array();
    for (const ReplicateRecord& rec : r.replicates)
        per.push_back({{"n", rec.n}, {"rep", rec.rep}, {"elapsed_ms", rec.elapsed_ms}});
    j["replicates"] = per;
    auto out = open_out(dir, "timings.json");
    out << j.dump(2) << "\n";
}

}  // namespace

void write_run_report(const RunReport& r, const std::string& dir) {
    {
        auto out = open_out(dir, "replicates.csv");
        out << "n,rep,failed,empty_grid,grid_size,member_count,lambda_hat,err_h_at_hat,"
               "err_l2_at_hat,err_h_oracle,err_l2_oracle,oracle_lambda_h,oracle_lambda_l2,"
               "ratio_h,ratio_l2\n";
        for (const ReplicateRecord& rec : r.replicates) {
            out << rec.n << ',' << rec.rep << ',' << (rec.failed ? 1 : 0) << ','
                << (rec.empty_grid ? 1 : 0) << ',' << rec.grid.size() << ',' << rec.member_set.size()
                << ',' << format_double(rec.lambda_hat) << ',' << format_double(rec.err_h_at_hat)
                << ',' << format_double(rec.err_l2_at_hat) << ',' << format_double(rec.err_h_oracle)
                << ',' << format_double(rec.err_l2_oracle) << ','
                << format_double(rec.oracle_lambda_h) << ',' << format_double(rec.oracle_lambda_l2)
                << ',' << format_double(rec.ratio_h) << ',' << format_double(rec.ratio_l2) << "\n";
        }
    }
    {
        auto out = open_out(dir, "errors_by_lambda.csv");
        out << "n,rep,lambda,err_h,err_l2,is_member,is_selected\n";
        for (const ReplicateRecord& rec : r.replicates) {
            if (rec.failed || !rec.has_exact_errors) continue;
            const std::vector<double> grid =
                rec.grid.empty() ? std::vector<double>{rec.lambda_hat} : rec.grid;
            for (size_t l = 0; l < grid.size(); ++l) {
                const bool member =
                    std::find(rec.member_set.begin(), rec.member_set.end(), grid[l]) !=
                    rec.member_set.end();
                out << rec.n << ',' << rec.rep << ',' << format_double(grid[l]) << ','
                    << format_double(rec.err_h[l]) << ',' << format_double(rec.err_l2[l]) << ','
                    << (member ? 1 : 0) << ',' << (grid[l] == rec.lambda_hat ? 1 : 0) << "\n";
            }
        }
    }
    {
        auto out = open_out(dir, "comparisons.csv");
        out << "n,rep,lambda,lambda_prime,lhs,rhs,pass\n";
        for (const ReplicateRecord& rec : r.replicates)
            for (const Comparison& c : rec.comparisons)
                out << rec.n << ',' << rec.rep << ',' << format_double(c.lambda) << ','
                    << format_double(c.lambda_prime) << ',' << format_double(c.lhs) << ','
                    << format_double(c.rhs) << ',' << (c.pass ? 1 : 0) << "\n";
    }
    {
        auto out = open_out(dir, "aggregate.csv");
        out << "n,replicates,empty_grid_count,failure_count,usable,med_err_h,q25_err_h,q75_err_h,"
               "med_err_l2,q25_err_l2,q75_err_l2,med_ratio_h,med_ratio_l2,med_lambda_hat\n";
        for (const AggregateRow& a : r.aggregates)
            out << a.n << ',' << a.replicates << ',' << a.empty_grid_count << ',' << a.failure_count
                << ',' << a.usable << ',' << format_double(a.med_err_h) << ','
                << format_double(a.q25_err_h) << ',' << format_double(a.q75_err_h) << ','
                << format_double(a.med_err_l2) << ',' << format_double(a.q25_err_l2) << ','
                << format_double(a.q75_err_l2) << ',' << format_double(a.med_ratio_h) << ','
                << format_double(a.med_ratio_l2) << ',' << format_double(a.med_lambda_hat) << "\n";
    }
    write_summary(r, dir);
    write_timings(r, dir);
}

void write_rate_study(const RateStudyResult& res, const std::string& dir) {
    // same CSV set as a plain run; the summary then gains the regression verdict
    write_run_report(res.report, dir);
    json extra;
    extra["rate_study"] = {{"predicted_exponent_h", res.predicted_exponent_h},
                           {"predicted_exponent_l2", res.predicted_exponent_l2},
                           {"fitted_exponent_h", res.fitted_exponent_h},
                           {"fitted_exponent_l2", res.fitted_exponent_l2},
                           {"conclusive", res.conclusive},
                           {"pass_h", res.pass_h},
                           {"pass_l2", res.pass_l2}};
    write_summary(res.report, dir, extra);
}

void write_baseline_report(const BaselineReport& r, const std::string& dir) {
    {
        auto out = open_out(dir, "baseline.csv");
        out << "n,rep,failed,lambda_balancing,lambda_holdout,err_h_balancing,err_l2_balancing,"
               "err_h_holdout,err_l2_holdout\n";
        for (const BaselineReplicate& rec : r.replicates)
            out << rec.n << ',' << rec.rep << ',' << (rec.failed ? 1 : 0) << ','
                << format_double(rec.lambda_balancing) << ',' << format_double(rec.lambda_holdout)
                << ',' << format_double(rec.err_h_balancing) << ','
                << format_double(rec.err_l2_balancing) << ',' << format_double(rec.err_h_holdout)
                << ',' << format_double(rec.err_l2_holdout) << "\n";
    }
    json j;
    j["config"] = config_json(r.config);
    json rows = json::array();
    for (const BaselineRow& row : r.rows)
        rows.push_back({{"n", row.n},
                        {"med_err_h_balancing", row.med_err_h_balancing},
                        {"med_err_l2_balancing", row.med_err_l2_balancing},
                        {"med_err_h_holdout", row.med_err_h_holdout},
                        {"med_err_l2_holdout", row.med_err_l2_holdout},
                        {"med_rkhs_ratio_holdout_over_balancing", row.med_rkhs_ratio}});
    j["baseline"] = rows;
    auto out = open_out(dir, "baseline_summary.json");
    out << j.dump(2) << "\n";
}

void write_diagnostics_report(const DiagnosticsReport& r, const ExperimentConfig& config,
                              const std::string& dir) {
    {
        auto out = open_out(dir, "coverage.csv");
        out << "lambda,replicates,viol_gamma,viol_psi,viol_theta,viol_effdim,effdim_applicable\n";
        for (const CoverageRow& row : r.coverage)
            out << format_double(row.lambda) << ',' << row.replicates << ',' << row.viol_gamma << ','
                << row.viol_psi << ',' << row.viol_theta << ',' << row.viol_effdim << ','
                << (row.effdim_applicable ? 1 : 0) << "\n";
    }
    json j;
    j["config"] = config_json(config);
    j["eta"] = r.eta;
    j["coverage_ok"] = r.coverage_ok;
    j["deterministic_ok"] = r.deterministic_ok;
    auto prop = [](const PropertyCheckResult& p) {
        return json{{"max_violation", p.max_violation}, {"worst_seed", p.worst_seed}, {"detail", p.detail}};
    };
    j["sublinear_perturbation"] = prop(r.sublinear);
    j["cordes_style"] = prop(r.cordes);
    j["zhou_decomposition"] = prop(r.zhou);
    j["interpolation_tool"] = prop(r.interpolation);
    j["moment_inequality"] = prop(r.moment);
    auto out = open_out(dir, "diagnostics_summary.json");
    out << j.dump(2) << "\n";
}

}  // namespace slb
