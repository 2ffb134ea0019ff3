#include "slb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace slb {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double quantile(std::vector<double> v, double p) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double idx = p * (v.size() - 1);
    const size_t lo = static_cast<size_t>(idx);
    const size_t hi = std::min(lo + 1, v.size() - 1);
    const double w = idx - lo;
    return (1.0 - w) * v[lo] + w * v[hi];
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

FilterFamily make_filter(const ExperimentConfig& c, double kappa_sq) {
    if (c.filter_kind == "tikhonov") return FilterFamily::tikhonov();
    if (c.filter_kind == "iterated_tikhonov") return FilterFamily::iterated_tikhonov(c.iterated_m);
    if (c.filter_kind == "spectral_cutoff") return FilterFamily::spectral_cutoff();
    return FilterFamily::landweber(kappa_sq, c.landweber_p);
}

NoiseModel make_noise(const ExperimentConfig& c) {
    if (c.noise_kind == "gaussian") return NoiseModel::gaussian(c.noise_scale);
    if (c.noise_kind == "bounded_uniform") return NoiseModel::bounded_uniform(c.noise_scale);
    if (c.noise_kind == "rademacher") return NoiseModel::rademacher(c.noise_scale);
    return NoiseModel::none();
}

constexpr double kNoiseFloor = 1e-12;  // keeps sigma, M positive for the rule

struct Problem {
    SpectralModel model;
    SourceConditionTarget target;
    NoiseModel noise;
    FilterFamily filter;
    double kappa_sq;       // of the estimation kernel
    double sigma, m_bern;  // floored Bernstein pair
};

Problem make_problem(const ExperimentConfig& c) {
    SpectralModel model = SpectralModel::power_law(c.dimension, c.b, c.mu_scale, c.basis_offset);
    SourceConditionTarget target =
        SourceConditionTarget::holder(model, c.r, c.h_decay, c.h_norm, c.h_sign_seed);
    NoiseModel noise = make_noise(c);
    const auto [sig, m] = bernstein_constants(noise);
    const double kappa_sq = c.kernel_kind == "gaussian" ? 1.0 : model.kappa_sq();
    FilterFamily filter = make_filter(c, kappa_sq);
    return Problem{std::move(model), std::move(target), noise, std::move(filter), kappa_sq,
                   std::max(sig, kNoiseFloor), std::max(m, kNoiseFloor)};
}

BalancingConfig make_balancing(const ExperimentConfig& c, const Problem& p, int n) {
    BalancingConfig bc;
    bc.q = c.q;
    bc.eta = c.eta_for(n);
    bc.sigma_noise = p.sigma;
    bc.bernstein_M = p.m_bern;
    bc.gamma_bar = p.filter.gamma_bar();
    bc.constant_mode = c.constant_mode;
    bc.c_user = c.c_user;
    bc.lambda_max = p.kappa_sq;
    return bc;
}

SpectralDecomposition decompose_for(const ExperimentConfig& c, const Problem& p,
                                    const Dataset& data) {
    if (c.kernel_kind == "mercer") return decompose_mercer(p.model, data.x, data.y);
    const KernelSpec kernel = KernelSpec::gaussian(c.gaussian_width);
    return decompose(gram_matrix(kernel, data.x), data.y, kernel.sup_bound());
}

ReplicateRecord run_replicate(const ExperimentConfig& c, const Problem& p, int n, int rep) {
    ReplicateRecord out;
    out.n = n;
    out.rep = rep;
    const auto t0 = std::chrono::steady_clock::now();

    const std::uint64_t rep_seed = derive_seed(c.seed, static_cast<std::uint64_t>(n), rep);
    const Dataset data = sample_dataset(p.model, p.target, p.noise, n, rep_seed);
    const SpectralDecomposition dec = decompose_for(c, p, data);
    const BalancingConfig bc = make_balancing(c, p, n);

    out.grid = build_data_grid(dec, p.kappa_sq, n, bc);
    Eigen::VectorXd path_grid;
    if (out.grid.empty()) {
        out.empty_grid = true;
        out.lambda_hat = p.kappa_sq;
        path_grid = Eigen::VectorXd::Constant(1, p.kappa_sq);  // sentinel estimator for reporting
    } else {
        path_grid = Eigen::Map<const Eigen::VectorXd>(out.grid.data(), out.grid.size());
    }
    const EstimatorPath path = fit_path(dec, p.filter, path_grid);

    if (!out.grid.empty()) {
        BalancingOutcome sel = select_data_driven(dec, path, out.grid, p.kappa_sq, n, bc);
        out.lambda_hat = sel.lambda_hat;
        out.member_set = std::move(sel.member_set);
        out.comparisons = std::move(sel.comparisons);
    }

    if (c.kernel_kind == "mercer") {
        out.has_exact_errors = true;
        const ExactErrorEvaluator eval(p.model, p.target, data.x);
        const int L = static_cast<int>(path_grid.size());
        out.err_h.resize(L);
        out.err_l2.resize(L);
        int best_h = 0, best_l2 = 0;
        for (int l = 0; l < L; ++l) {
            const ErrorNorms e = eval.at(dec, path, path_grid[l]);
            out.err_h[l] = e.rkhs;
            out.err_l2[l] = e.l2;
            if (e.rkhs < out.err_h[best_h]) best_h = l;
            if (e.l2 < out.err_l2[best_l2]) best_l2 = l;
        }
        const int hat = path.index_of(out.lambda_hat);
        out.err_h_at_hat = out.err_h[hat];
        out.err_l2_at_hat = out.err_l2[hat];
        out.err_h_oracle = out.err_h[best_h];
        out.err_l2_oracle = out.err_l2[best_l2];
        out.oracle_lambda_h = path_grid[best_h];
        out.oracle_lambda_l2 = path_grid[best_l2];
        out.ratio_h = out.err_h_oracle > 0.0 ? out.err_h_at_hat / out.err_h_oracle : 1.0;
        out.ratio_l2 = out.err_l2_oracle > 0.0 ? out.err_l2_at_hat / out.err_l2_oracle : 1.0;
    }

    out.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

AggregateRow aggregate(int n, const std::vector<const ReplicateRecord*>& recs) {
    AggregateRow row;
    row.n = n;
    row.replicates = static_cast<int>(recs.size());
    std::vector<double> eh, el, rh, rl, lh;
    for (const ReplicateRecord* r : recs) {
        if (r->failed) {
            ++row.failure_count;
            continue;
        }
        if (r->empty_grid) {
            ++row.empty_grid_count;
            continue;
        }
        ++row.usable;
        lh.push_back(r->lambda_hat);
        if (r->has_exact_errors) {
            eh.push_back(r->err_h_at_hat);
            el.push_back(r->err_l2_at_hat);
            rh.push_back(r->ratio_h);
            rl.push_back(r->ratio_l2);
        }
    }
    row.med_err_h = median(eh);
    row.q25_err_h = quantile(eh, 0.25);
    row.q75_err_h = quantile(eh, 0.75);
    row.med_err_l2 = median(el);
    row.q25_err_l2 = quantile(el, 0.25);
    row.q75_err_l2 = quantile(el, 0.75);
    row.med_ratio_h = median(rh);
    row.med_ratio_l2 = median(rl);
    row.med_lambda_hat = median(lh);
    return row;
}

}  // namespace

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    SlopeFit fit;
    const int n = static_cast<int>(x.size());
    fit.points = n;
    if (n < 2 || y.size() != x.size()) return fit;
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0;
    fit.residuals.resize(n);
    for (int i = 0; i < n; ++i) {
        fit.residuals[i] = y[i] - (fit.intercept + fit.slope * x[i]);
        sse += fit.residuals[i] * fit.residuals[i];
    }
    fit.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
    fit.std_error = n > 2 ? std::sqrt(sse / ((n - 2) * sxx)) : 0.0;
    return fit;
}

RunReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const Problem p = make_problem(config);

    RunReport report;
    report.config = config;
    report.kappa_sq = p.kappa_sq;
    report.sigma_bernstein = p.sigma;
    report.m_bernstein = p.m_bern;
    report.has_exact_errors = config.kernel_kind == "mercer";

    const int R = config.replicates;
    const int total = static_cast<int>(config.n_list.size()) * R;
    report.replicates.resize(total);

    parallel_for(total, resolve_threads(config.threads), [&](int idx) {
        const int n = config.n_list[idx / R];
        const int rep = idx % R;
        try {
            report.replicates[idx] = run_replicate(config, p, n, rep);
        } catch (const std::exception& e) {
            ReplicateRecord bad;
            bad.n = n;
            bad.rep = rep;
            bad.failed = true;
            bad.error = e.what();
            report.replicates[idx] = std::move(bad);
        }
    });

    int failures = 0;
    for (size_t i = 0; i < config.n_list.size(); ++i) {
        std::vector<const ReplicateRecord*> recs;
        for (int rep = 0; rep < R; ++rep) recs.push_back(&report.replicates[i * R + rep]);
        report.aggregates.push_back(aggregate(config.n_list[i], recs));
        failures += report.aggregates.back().failure_count;
    }
    report.failure_fraction = static_cast<double>(failures) / total;
    if (report.failure_fraction > 0.05)
        throw std::runtime_error("run_experiment: more than 5% of replicates failed; first error: " +
                                 [&] {
                                     for (const auto& r : report.replicates)
                                         if (r.failed) return r.error;
                                     return std::string("unknown");
                                 }());

    if (report.has_exact_errors) {
        std::vector<double> lx, lh, ll;
        for (const AggregateRow& row : report.aggregates) {
            if (row.usable < std::max(1, row.replicates / 2)) continue;  // empty-grid exclusion
            lx.push_back(std::log(static_cast<double>(row.n)));
            lh.push_back(std::log(row.med_err_h));
            ll.push_back(std::log(row.med_err_l2));
        }
        report.slope_h = fit_line(lx, lh);
        report.slope_l2 = fit_line(lx, ll);
    }

    report.total_elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

RateStudyResult rate_study(const ExperimentConfig& config) {
    config.validate();
    if (config.kernel_kind != "mercer")
        throw ConfigError("rate_study: exact-error rate studies require the mercer kernel");
    if (config.n_list.size() < 4) throw ConfigError("rate_study: need at least 4 distinct n values");
    if (config.replicates < 50) throw ConfigError("rate_study: need at least 50 replicates per n");

    RateStudyResult res;
    res.report = run_experiment(config);

    const Problem p = make_problem(config);
    res.predicted_exponent_h = rate_oracle(p.model, p.target, 0.0);
    res.predicted_exponent_l2 = rate_oracle(p.model, p.target, 0.5);

    res.conclusive = res.report.slope_h.points >= 3;
    if (res.conclusive) {
        res.fitted_exponent_h = -res.report.slope_h.slope;
        res.fitted_exponent_l2 = -res.report.slope_l2.slope;
        res.pass_h = std::abs(res.fitted_exponent_h - res.predicted_exponent_h) <= config.slope_tolerance;
        res.pass_l2 =
            std::abs(res.fitted_exponent_l2 - res.predicted_exponent_l2) <= config.slope_tolerance;
    }
    return res;
}

BaselineReport baseline_holdout(const ExperimentConfig& config) {
    config.validate();
    if (config.kernel_kind != "mercer")
        throw ConfigError("baseline_holdout: exact error norms require the mercer kernel");
    const Problem p = make_problem(config);

    BaselineReport report;
    report.config = config;
    const int R = config.replicates;
    const int total = static_cast<int>(config.n_list.size()) * R;
    report.replicates.resize(total);
    const KernelSpec kernel = KernelSpec::mercer(p.model);

    parallel_for(total, resolve_threads(config.threads), [&](int idx) {
        const int n = config.n_list[idx / R];
        const int rep = idx % R;
        BaselineReplicate out;
        out.n = n;
        out.rep = rep;
        try {
            const std::uint64_t rep_seed =
                derive_seed(config.seed ^ 0xba5e11ULL, static_cast<std::uint64_t>(n), rep);
            const Dataset data = sample_dataset(p.model, p.target, p.noise, n, rep_seed);
            const int n_tr = n / 2;
            const int n_ho = n - n_tr;
            const Eigen::VectorXd x_tr = data.x.head(n_tr), y_tr = data.y.head(n_tr);
            const Eigen::VectorXd x_ho = data.x.tail(n_ho), y_ho = data.y.tail(n_ho);

            const SpectralDecomposition dec = decompose_mercer(p.model, x_tr, y_tr);
            const BalancingConfig bc = make_balancing(config, p, n_tr);
            const std::vector<double> grid = build_data_grid(dec, p.kappa_sq, n_tr, bc);
            if (grid.empty()) throw std::runtime_error("baseline: empty data grid");
            const Eigen::VectorXd path_grid =
                Eigen::Map<const Eigen::VectorXd>(grid.data(), grid.size());
            const EstimatorPath path = fit_path(dec, p.filter, path_grid);

            const BalancingOutcome sel = select_data_driven(dec, path, grid, p.kappa_sq, n_tr, bc);
            out.lambda_balancing = sel.lambda_hat;

            // hold-out empirical prediction risk
            double best_risk = std::numeric_limits<double>::infinity();
            for (double lam : grid) {
                const Eigen::VectorXd pred = predict(path, dec, kernel, x_tr, x_ho, lam);
                const double risk = (pred - y_ho).squaredNorm() / n_ho;
                if (risk < best_risk) {
                    best_risk = risk;
                    out.lambda_holdout = lam;
                }
            }

            const ExactErrorEvaluator eval(p.model, p.target, x_tr);
            const ErrorNorms e_bal = eval.at(dec, path, out.lambda_balancing);
            const ErrorNorms e_ho = eval.at(dec, path, out.lambda_holdout);
            out.err_h_balancing = e_bal.rkhs;
            out.err_l2_balancing = e_bal.l2;
            out.err_h_holdout = e_ho.rkhs;
            out.err_l2_holdout = e_ho.l2;
        } catch (const std::exception& e) {
            out.failed = true;
            out.error = e.what();
        }
        report.replicates[idx] = std::move(out);
    });

    for (size_t i = 0; i < config.n_list.size(); ++i) {
        BaselineRow row;
        row.n = config.n_list[i];
        std::vector<double> hb, lb, hh, lh, ratio;
        for (int rep = 0; rep < R; ++rep) {
            const BaselineReplicate& r = report.replicates[i * R + rep];
            if (r.failed) continue;
            hb.push_back(r.err_h_balancing);
            lb.push_back(r.err_l2_balancing);
            hh.push_back(r.err_h_holdout);
            lh.push_back(r.err_l2_holdout);
            if (r.err_h_balancing > 0) ratio.push_back(r.err_h_holdout / r.err_h_balancing);
        }
        row.med_err_h_balancing = median(hb);
        row.med_err_l2_balancing = median(lb);
        row.med_err_h_holdout = median(hh);
        row.med_err_l2_holdout = median(lh);
        row.med_rkhs_ratio = median(ratio);
        report.rows.push_back(row);
    }
    return report;
}

DiagnosticsReport run_diagnostics(const ExperimentConfig& config, int coverage_replicates,
                                  int deterministic_trials, int dim) {
    config.validate();
    if (config.kernel_kind != "mercer")
        throw ConfigError("run_diagnostics: deviation studies require the mercer model");
    const Problem p = make_problem(config);
    const int n = config.n_list.back();
    const double eta = config.eta_for(n);

    DiagnosticsReport rep;
    rep.eta = eta;

    // deterministic population analogue of the data-dependent grid
    for (int i = 0; i <= 200; ++i) {
        const double lam = p.kappa_sq * std::pow(config.q, -static_cast<double>(i));
        const double npop = std::max(population_effective_dimension(p.model, lam), 1.0);
        if (lam < 3.0 * p.kappa_sq * npop / n) break;
        rep.lambda_grid.push_back(lam);
    }
    if (rep.lambda_grid.empty()) rep.lambda_grid.push_back(p.kappa_sq);

    rep.coverage = coverage_study(p.model, p.target, make_noise(config), rep.lambda_grid, n,
                                  coverage_replicates, eta, derive_seed(config.seed, 0xd1a6ULL),
                                  resolve_threads(config.threads));
    rep.coverage_ok = true;
    for (const CoverageRow& row : rep.coverage) {
        const double limit = eta * row.replicates;
        if (row.viol_gamma > limit || row.viol_psi > limit || row.viol_theta > limit ||
            (row.effdim_applicable && row.viol_effdim > limit))
            rep.coverage_ok = false;
    }

    const std::uint64_t s = derive_seed(config.seed, 0xdececcULL);
    rep.sublinear = check_sublinear_perturbation(deterministic_trials, dim, derive_seed(s, 1));
    rep.cordes = check_cordes_style(deterministic_trials, dim, derive_seed(s, 2));
    rep.zhou = check_zhou_decomposition(deterministic_trials, dim, derive_seed(s, 3));
    rep.interpolation = check_interpolation_tool(deterministic_trials, dim, derive_seed(s, 4));
    rep.moment = check_moment_inequality(deterministic_trials, dim, derive_seed(s, 5));
    const double tol = 1e-9;
    rep.deterministic_ok = rep.sublinear.max_violation <= tol && rep.cordes.max_violation <= tol &&
                           rep.zhou.max_violation <= tol && rep.interpolation.max_violation <= tol &&
                           rep.moment.max_violation <= tol;
    return rep;
}

}  // namespace slb
