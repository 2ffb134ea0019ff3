#include "slb/balancing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slb {

void BalancingConfig::validate() const {
    if (!(q > 1.0)) throw std::invalid_argument("BalancingConfig: q must exceed 1");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("BalancingConfig: eta must lie in (0,1)");
    if (!(sigma_noise > 0.0)) throw std::invalid_argument("BalancingConfig: sigma must be positive");
    if (!(bernstein_M > 0.0)) throw std::invalid_argument("BalancingConfig: M must be positive");
    if (!(gamma_bar > 0.0)) throw std::invalid_argument("BalancingConfig: gamma_bar must be positive");
    if (constant_mode == ConstantMode::scaled && !(c_user > 0.0))
        throw std::invalid_argument("BalancingConfig: c_user must be positive");
    if (!(lambda_max > 0.0)) throw std::invalid_argument("BalancingConfig: lambda_max must be positive");
}

double BalancingConfig::threshold_multiplier(int n) const {
    if (constant_mode == ConstantMode::theory) return 64.0 * gamma_bar * ell_eta_n(n, eta, q);
    return c_user;
}

double ell_eta_n(int n, double eta, double q) {
    if (n < 3) throw std::invalid_argument("ell_eta_n: n must be >= 3");
    if (!(q > 1.0)) throw std::invalid_argument("ell_eta_n: q must exceed 1");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("ell_eta_n: eta must lie in (0,1)");
    const double arg = 8.0 * std::log(static_cast<double>(n)) / (eta * std::log(q));
    if (!(arg > 0.0)) throw std::invalid_argument("ell_eta_n: inner logarithm argument not positive");
    return 2.0 * std::log(arg);
}

double estimation_term_empirical(const SpectralDecomposition& dec, double lambda, int n,
                                 double sigma, double M) {
    if (!(lambda > 0.0)) throw std::invalid_argument("estimation_term_empirical: lambda must be positive");
    const double nx = std::max(empirical_effective_dimension(dec, lambda), 1.0);
    return (sigma * std::sqrt(2.0 * nx) + M / 5.0) / std::sqrt(lambda * n);
}

namespace {

constexpr int kMaxGridDepth = 400;

std::vector<double> build_grid_impl(const std::function<double(double)>& nx, double kappa_sq,
                                    int n, const BalancingConfig& config) {
    std::vector<double> grid;
    const GridRule rule = config.effective_grid_rule();
    const double mult = config.threshold_multiplier(n);
    const double ell = (rule == GridRule::theory) ? ell_eta_n(n, config.eta, config.q) : 0.0;
    for (int i = 0; i <= kMaxGridDepth; ++i) {
        const double lam = kappa_sq * std::pow(config.q, -static_cast<double>(i));
        bool ok;
        if (rule == GridRule::theory) {
            ok = lam >= 100.0 * kappa_sq * ell * ell / n &&
                 lam >= 3.0 * kappa_sq * std::max(nx(lam), 1.0) / n;
        } else {
            const double sx = (config.sigma_noise * std::sqrt(2.0 * std::max(nx(lam), 1.0)) +
                               config.bernstein_M / 5.0) /
                              std::sqrt(lam * n);
            ok = mult * std::sqrt(lam) * sx <= 1.0 &&
                 lam >= kappa_sq / (static_cast<double>(n) * n);
        }
        if (!ok) break;
        grid.push_back(lam);
    }
    return grid;
}

}  // namespace

std::vector<double> build_data_grid(const std::function<double(double)>& effective_dimension,
                                    double kappa_sq, int n, const BalancingConfig& config) {
    config.validate();
    if (n < 1) throw std::invalid_argument("build_data_grid: n must be >= 1");
    return build_grid_impl(effective_dimension, kappa_sq, n, config);
}

std::vector<double> build_data_grid(const SpectralDecomposition& dec, double kappa_sq, int n,
                                    const BalancingConfig& config) {
    return build_data_grid(
        [&dec](double lam) { return empirical_effective_dimension(dec, lam); }, kappa_sq, n, config);
}

AbstractSelection abstract_select(const std::vector<double>& grid,
                                  const std::function<double(double, double)>& pair_norm,
                                  const std::function<double(double)>& S, double C) {
    const int L = static_cast<int>(grid.size());
    if (L == 0) throw std::invalid_argument("abstract_select: empty grid");
    for (int i = 1; i < L; ++i)
        if (!(grid[i] < grid[i - 1]))
            throw std::invalid_argument("abstract_select: grid must be strictly descending");
    // Assumption: lambda -> sqrt(lambda) S(lambda) nonincreasing along the grid.
    for (int i = 1; i < L; ++i) {
        const double a = std::sqrt(grid[i - 1]) * S(grid[i - 1]);
        const double b = std::sqrt(grid[i]) * S(grid[i]);
        if (b < a * (1.0 - 1e-12))
            throw std::invalid_argument("abstract_select: sqrt(lambda) S(lambda) must be nonincreasing");
    }

    AbstractSelection sel;
    for (int i = 0; i < L; ++i) {
        bool member = true;
        for (int j = i + 1; j < L; ++j) {
            const double lhs = pair_norm(grid[i], grid[j]);
            const double rhs = 4.0 * C * std::sqrt(grid[j]) * S(grid[j]);
            const bool pass = lhs <= rhs;
            sel.comparisons.push_back({grid[i], grid[j], lhs, rhs, pass});
            if (!pass) member = false;
        }
        if (member) sel.member_set.push_back(grid[i]);
    }
    sel.lambda_hat = sel.member_set.front();  // grid is descending, first member is the max
    return sel;
}

BalancingOutcome select_data_driven(const SpectralDecomposition& dec, const EstimatorPath& path,
                                    const std::vector<double>& lambda_grid, double kappa_sq, int n,
                                    const BalancingConfig& config) {
    config.validate();
    BalancingOutcome out;
    out.grid = lambda_grid;
    out.threshold_constant = config.threshold_multiplier(n);
    if (lambda_grid.empty()) {
        out.lambda_hat = kappa_sq;
        out.empty_grid_flag = true;
        return out;
    }
    for (double lam : lambda_grid) path.index_of(lam);  // demand path coverage up front

    // Grid ratio contract S_x(lambda_i) <= q S_x(lambda_{i-1}), a consequence of
    // N_x(lambda/q) <= q N_x(lambda); checked on every run.
    const double sigma = config.sigma_noise, M = config.bernstein_M;
    for (size_t i = 1; i < lambda_grid.size(); ++i) {
        const double s_lo = estimation_term_empirical(dec, lambda_grid[i], n, sigma, M);
        const double s_hi = estimation_term_empirical(dec, lambda_grid[i - 1], n, sigma, M);
        if (s_lo > config.q * s_hi * (1.0 + 1e-12))
            throw std::logic_error("select_data_driven: grid ratio contract violated");
    }

    AbstractSelection sel = abstract_select(
        lambda_grid,
        [&](double lam, double lam_p) { return weighted_diff_norm(dec, path, lam, lam_p); },
        [&](double lam) { return estimation_term_empirical(dec, lam, n, sigma, M); },
        out.threshold_constant / 4.0);

    out.lambda_hat = sel.lambda_hat;
    out.member_set = std::move(sel.member_set);
    out.comparisons = std::move(sel.comparisons);
    return out;
}

BalancingOutcome select_data_driven(const SpectralDecomposition& dec, const EstimatorPath& path,
                                    double kappa_sq, int n, const BalancingConfig& config) {
    return select_data_driven(dec, path, build_data_grid(dec, kappa_sq, n, config), kappa_sq, n,
                              config);
}

double lambda_star(const std::vector<double>& grid, const std::function<double(double)>& A,
                   const std::function<double(double)>& S) {
    if (grid.empty()) throw std::invalid_argument("lambda_star: empty grid");
    double best = grid.back();  // lambda_min always belongs
    for (double lam : grid)
        if (A(lam) <= S(lam)) best = std::max(best, lam);
    return best;
}

double theoretical_lambda_min(const std::function<double(double)>& effective_dimension,
                              double kappa_sq, int n, double q, double eta) {
    const double ell = ell_eta_n(n, eta, q);
    if (n < std::max(100.0 * ell * ell, 6.0))
        throw std::invalid_argument("theoretical_lambda_min: n below max(100 ell^2, 6)");
    double last_ok = -1.0;
    for (int i = 0; i <= kMaxGridDepth; ++i) {
        const double lam = kappa_sq * std::pow(q, -static_cast<double>(i));
        const bool ok = lam >= 100.0 * kappa_sq * ell * ell / n &&
                        lam >= 6.0 * kappa_sq * std::max(effective_dimension(lam), 1.0) / n;
        if (!ok) break;
        last_ok = lam;
    }
    if (last_ok < 0.0) throw std::logic_error("theoretical_lambda_min: defining set is empty");
    return q * last_ok;
}

}  // namespace slb
