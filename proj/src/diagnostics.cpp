#include "slb/diagnostics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

namespace slb {

namespace {

// B_x in the model's orthonormal basis: (1/n) sum_i v(x_i) v(x_i)^T with
// v_j(x) = sqrt(mu_j) e_j(x).
Eigen::MatrixXd empirical_operator(const SpectralModel& model, const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd Wd = model.basis_matrix(x);
    const Eigen::VectorXd root_mu = model.eigenvalues().cwiseSqrt();
    for (int j = 0; j < model.dimension(); ++j) Wd.col(j) *= root_mu[j];
    Eigen::MatrixXd Bx(model.dimension(), model.dimension());
    Bx.setZero();
    Bx.selfadjointView<Eigen::Lower>().rankUpdate(Wd.transpose(), 1.0 / n);
    return Eigen::MatrixXd(Bx.selfadjointView<Eigen::Lower>());
}

double trace_effective_dimension(const Eigen::MatrixXd& B, double lambda) {
    const int D = static_cast<int>(B.rows());
    Eigen::MatrixXd shifted = B;
    shifted.diagonal().array() += lambda;
    return (shifted.llt().solve(B)).trace();
}

}  // namespace

DeviationSample compute_deviations(const SpectralModel& model, const SourceConditionTarget& target,
                                   const Dataset& data, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("compute_deviations: lambda must be positive");
    const int n = static_cast<int>(data.x.size());
    const int D = model.dimension();
    const Eigen::VectorXd& mu = model.eigenvalues();

    const Eigen::MatrixXd Bx = empirical_operator(model, data.x);
    Eigen::MatrixXd diff = -Bx;
    diff.diagonal() += mu;

    DeviationSample s;
    s.lambda = lambda;
    s.gamma = diff.norm();

    // (lambda + B)^{-1/2} is diagonal in this basis: row scaling.
    Eigen::VectorXd w = (mu.array() + lambda).rsqrt();
    s.psi = (w.asDiagonal() * diff).norm();

    // B_x f_rho - T_x* y = -(1/n) sum_i eps_i K_{x_i}; coordinates via residuals.
    Eigen::VectorXd resid = data.y - data.f_true;
    Eigen::VectorXd coords = Eigen::VectorXd::Zero(D);
    for (int i = 0; i < n; ++i) {
        const double xi = data.x[i];
        for (int j = 0; j < D; ++j)
            coords[j] -= resid[i] * std::sqrt(mu[j]) * model.basis(j, xi);
    }
    coords /= n;
    s.theta = (w.asDiagonal() * coords).norm();

    s.n_pop = population_effective_dimension(model, lambda);
    s.n_emp = trace_effective_dimension(Bx, lambda);
    s.effdim_gap = std::abs(s.n_pop - s.n_emp);
    return s;
}

double deviation_bound_bnl(double a, double b, double lambda, int n, double kappa_sq,
                           double n_pop) {
    const double kappa = std::sqrt(kappa_sq);
    return (a * 2.0 * kappa / (std::sqrt(lambda) * n) + b * std::sqrt(n_pop / n)) /
           std::sqrt(lambda);
}

std::vector<CoverageRow> coverage_study(const SpectralModel& model,
                                        const SourceConditionTarget& target,
                                        const NoiseModel& noise,
                                        const std::vector<double>& lambda_grid, int n,
                                        int replicates, double eta, std::uint64_t seed,
                                        int threads) {
    if (replicates < 1) throw std::invalid_argument("coverage_study: replicates must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("coverage_study: eta must lie in (0,1)");
    const double L = 2.0 * std::log(8.0 / eta);
    const double kappa_sq = model.kappa_sq();
    const double kappa = std::sqrt(kappa_sq);
    const auto [sigma, M] = bernstein_constants(noise);

    std::vector<CoverageRow> rows(lambda_grid.size());
    for (size_t g = 0; g < lambda_grid.size(); ++g) {
        rows[g].lambda = lambda_grid[g];
        rows[g].replicates = replicates;
        rows[g].effdim_applicable = lambda_grid[g] >= 4.0 * kappa_sq / n;
    }

    // Per-replicate violation flags gathered into fixed slots so threading
    // cannot change the result.
    std::vector<std::vector<std::array<bool, 4>>> flags(
        replicates, std::vector<std::array<bool, 4>>(lambda_grid.size(), {false, false, false, false}));

    auto worker = [&](int rep) {
        const Dataset data = sample_dataset(model, target, noise, n, derive_seed(seed, n, rep));
        for (size_t g = 0; g < lambda_grid.size(); ++g) {
            const double lam = lambda_grid[g];
            const DeviationSample s = compute_deviations(model, target, data, lam);
            const double root_lam = std::sqrt(lam);
            flags[rep][g][0] = s.gamma > L * kappa_sq / std::sqrt(static_cast<double>(n));
            flags[rep][g][1] =
                s.psi > L * root_lam * deviation_bound_bnl(kappa, kappa, lam, n, kappa_sq, s.n_pop);
            flags[rep][g][2] =
                s.theta > L * root_lam * deviation_bound_bnl(M, sigma, lam, n, kappa_sq, s.n_pop);
            if (rows[g].effdim_applicable) {
                const double a = std::max(s.n_pop, 1.0), b = std::max(s.n_emp, 1.0);
                const double ratio = std::max(a / b, b / a);
                const double bound = std::pow(1.0 + 4.0 * kappa * L / std::sqrt(lam * n), 2);
                flags[rep][g][3] = ratio > bound;
            }
        }
    };

    if (threads <= 1) {
        for (int rep = 0; rep < replicates; ++rep) worker(rep);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (int rep = next.fetch_add(1); rep < replicates; rep = next.fetch_add(1))
                    worker(rep);
            });
        for (auto& th : pool) th.join();
    }

    for (int rep = 0; rep < replicates; ++rep)
        for (size_t g = 0; g < lambda_grid.size(); ++g) {
            rows[g].viol_gamma += flags[rep][g][0];
            rows[g].viol_psi += flags[rep][g][1];
            rows[g].viol_theta += flags[rep][g][2];
            rows[g].viol_effdim += flags[rep][g][3];
        }
    return rows;
}

namespace {

// Random positive definite matrix Q diag(d) Q^T with Q from the QR factor of a
// standard normal matrix and d log-uniform in [1e-3, 1].
Eigen::MatrixXd random_spd(int dim, Rng& rng) {
    Eigen::MatrixXd A(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) A(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::VectorXd d(dim);
    for (int i = 0; i < dim; ++i) d[i] = std::pow(10.0, rng.uniform(-3.0, 0.0));
    return Q * d.asDiagonal() * Q.transpose();
}

// phi(M) via symmetric eigendecomposition.
Eigen::MatrixXd matrix_function(const Eigen::MatrixXd& M, const std::function<double(double)>& f) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    Eigen::VectorXd d = eig.eigenvalues();
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = f(d[i]);
    return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

double operator_norm(const Eigen::MatrixXd& M) {
    return M.jacobiSvd().singularValues()[0];
}

struct SublinearFn {
    const char* name;
    std::function<double(double)> f;
};

const SublinearFn kSublinearSet[] = {
    {"t^1/4", [](double t) { return std::pow(t, 0.25); }},
    {"t^1/2", [](double t) { return std::sqrt(t); }},
    {"t^3/4", [](double t) { return std::pow(t, 0.75); }},
    {"t", [](double t) { return t; }},
    {"t/(1+t)", [](double t) { return t / (1.0 + t); }},
    {"log(1+t)", [](double t) { return std::log1p(t); }},
};

// Simulated (B, B_x) pair: B random SPD, B_x = (1/m) sum B^{1/2} z z^T B^{1/2}
// so that E[B_x] = B; returns standardized S = B/lambda, S_x = B_x/lambda and
// Psi_x = ||(I+S)^{-1/2}(S - S_x)||_HS.
struct StandardizedPair {
    Eigen::MatrixXd S, Sx;
    double psi_x;
};

StandardizedPair random_pair(int dim, Rng& rng) {
    const Eigen::MatrixXd B = random_spd(dim, rng);
    const Eigen::MatrixXd Bhalf = matrix_function(B, [](double t) { return std::sqrt(t); });
    const int m = dim + static_cast<int>(rng.uniform(0.0, 4.0 * dim));
    Eigen::MatrixXd Bx = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd z(dim);
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < dim; ++i) z[i] = rng.normal();
        const Eigen::VectorXd v = Bhalf * z;
        Bx += v * v.transpose();
    }
    Bx /= m;
    const double lambda = std::pow(10.0, rng.uniform(-3.0, 0.0));
    StandardizedPair p;
    p.S = B / lambda;
    p.Sx = Bx / lambda;
    Eigen::MatrixXd IpS = p.S;
    IpS.diagonal().array() += 1.0;
    const Eigen::MatrixXd root_inv = matrix_function(IpS, [](double t) { return 1.0 / std::sqrt(t); });
    p.psi_x = (root_inv * (p.S - p.Sx)).norm();
    return p;
}

void record(PropertyCheckResult& res, double violation, std::uint64_t seed, const char* what) {
    if (violation > res.max_violation) {
        res.max_violation = violation;
        res.worst_seed = seed;
        std::ostringstream msg;
        msg << what << " violated by " << violation << " (reproducer seed " << seed << ")";
        res.detail = msg.str();
    }
}

}  // namespace

PropertyCheckResult check_sublinear_perturbation(int trials, int dim, std::uint64_t seed) {
    if (dim < 1 || dim > 20) throw std::invalid_argument("check_sublinear_perturbation: dim must be in [1,20]");
    PropertyCheckResult res;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t s = derive_seed(seed, t);
        Rng rng(s);
        const Eigen::MatrixXd A = random_spd(dim, rng);
        const Eigen::MatrixXd B = random_spd(dim, rng);
        const Eigen::MatrixXd Binv = B.inverse();
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
        const double rhs = (A * Binv - I).norm();
        for (const auto& fn : kSublinearSet) {
            const Eigen::MatrixXd num = matrix_function(A, fn.f);
            const Eigen::MatrixXd den = matrix_function(B, fn.f).inverse();
            record(res, (num * den - I).norm() - rhs, s, fn.name);
        }
        // scalar form on random positive pairs
        for (int k = 0; k < 8; ++k) {
            const double mu = std::pow(10.0, rng.uniform(-3.0, 1.0));
            const double nu = std::pow(10.0, rng.uniform(-3.0, 1.0));
            for (const auto& fn : kSublinearSet)
                record(res, std::abs(fn.f(mu) / fn.f(nu) - 1.0) - std::abs(mu / nu - 1.0), s,
                       "scalar sublinear ratio");
        }
    }
    return res;
}

PropertyCheckResult check_cordes_style(int trials, int dim, std::uint64_t seed) {
    if (dim < 1 || dim > 20) throw std::invalid_argument("check_cordes_style: dim must be in [1,20]");
    PropertyCheckResult res;
    const double rs[] = {0.25, 0.5, 0.75, 1.0};
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t s = derive_seed(seed, t);
        Rng rng(s);
        const StandardizedPair p = random_pair(dim, rng);
        Eigen::MatrixXd IpS = p.S, IpSx = p.Sx;
        IpS.diagonal().array() += 1.0;
        IpSx.diagonal().array() += 1.0;
        const double bound1 = (p.psi_x + 1.0) * (p.psi_x + 1.0);
        for (const auto& fn : kSublinearSet) {
            const Eigen::MatrixXd lhs = matrix_function(IpS, fn.f) * matrix_function(IpSx, fn.f).inverse();
            record(res, operator_norm(lhs) - bound1, s, fn.name);
        }
        for (double r : rs) {
            const Eigen::MatrixXd lhs = matrix_function(IpS, [r](double v) { return std::pow(v, r); }) *
                                        matrix_function(IpSx, [r](double v) { return std::pow(v, -r); });
            record(res, operator_norm(lhs) - std::pow(p.psi_x + 1.0, 2.0 * r), s, "power r");
        }
    }
    return res;
}

PropertyCheckResult check_zhou_decomposition(int trials, int dim, std::uint64_t seed) {
    if (dim < 1 || dim > 20) throw std::invalid_argument("check_zhou_decomposition: dim must be in [1,20]");
    PropertyCheckResult res;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t s = derive_seed(seed, t);
        Rng rng(s);
        const StandardizedPair p = random_pair(dim, rng);
        Eigen::MatrixXd IpS = p.S, IpSx = p.Sx;
        IpS.diagonal().array() += 1.0;
        IpSx.diagonal().array() += 1.0;
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
        const double lhs = (IpS * IpSx.inverse() - I).norm();
        record(res, lhs - (p.psi_x + p.psi_x * p.psi_x), s, "zhou decomposition");
    }
    return res;
}

PropertyCheckResult check_interpolation_tool(int trials, int dim, std::uint64_t seed) {
    if (dim < 1 || dim > 20) throw std::invalid_argument("check_interpolation_tool: dim must be in [1,20]");
    PropertyCheckResult res;
    const double ss[] = {0.0, 0.25, 0.5};
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t s = derive_seed(seed, t);
        Rng rng(s);
        const Eigen::MatrixXd A = random_spd(dim, rng);
        Eigen::VectorXd h(dim);
        for (int i = 0; i < dim; ++i) h[i] = rng.normal();
        const double lambda = std::pow(10.0, rng.uniform(-3.0, 0.0));
        Eigen::MatrixXd Al = A;
        Al.diagonal().array() += lambda;
        const double F =
            (matrix_function(Al, [](double v) { return std::sqrt(v); }) * h).norm() / std::sqrt(lambda);
        for (double sv : ss) {
            const double lhs = (matrix_function(A, [sv](double v) { return std::pow(v, sv); }) * h).norm();
            record(res, lhs - std::pow(lambda, sv) * F, s, "interpolation tool");
        }
    }
    return res;
}

PropertyCheckResult check_moment_inequality(int trials, int dim, std::uint64_t seed) {
    if (dim < 1 || dim > 20) throw std::invalid_argument("check_moment_inequality: dim must be in [1,20]");
    PropertyCheckResult res;
    const double thetas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t s = derive_seed(seed, t);
        Rng rng(s);
        const Eigen::MatrixXd B = random_spd(dim, rng);
        Eigen::VectorXd f(dim);
        for (int i = 0; i < dim; ++i) f[i] = rng.normal();
        const double nf = f.norm();
        const double nBf = (B * f).norm();
        for (double th : thetas) {
            const double lhs = (matrix_function(B, [th](double v) { return std::pow(v, th); }) * f).norm();
            const double rhs = std::pow(nBf, th) * std::pow(nf, 1.0 - th);
            record(res, lhs - rhs, s, "moment inequality");
        }
    }
    return res;
}

}  // namespace slb
