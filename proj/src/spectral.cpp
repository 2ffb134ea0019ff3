#include "slb/spectral.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace slb {

namespace {

// Clamp an eigenvalue of G/n: negatives and values below 1e-8 kappa^2 go to 0,
// the top is capped at kappa^2 (1 + 1e-8).
double clamp_eigenvalue(double v, double kappa_sq) {
    if (v < 1e-8 * kappa_sq) return 0.0;
    return std::min(v, kappa_sq * (1.0 + 1e-8));
}

}  // namespace

SpectralDecomposition decompose(const Eigen::MatrixXd& G, const Eigen::VectorXd& y, double kappa_sq) {
    const int n = static_cast<int>(G.rows());
    if (G.cols() != n || n < 1) throw std::invalid_argument("decompose: G must be square and nonempty");
    if (y.size() != n) throw std::invalid_argument("decompose: y length must match G");
    if (!(kappa_sq > 0.0)) throw std::invalid_argument("decompose: kappa_sq must be positive");
    const double asym = (G - G.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * std::max(kappa_sq, G.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("decompose: G is not symmetric");

    Eigen::MatrixXd B = (G + G.transpose()) / (2.0 * n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
    if (eig.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "decompose: eigensolver failed (n=" << n << ", |G|_max=" << G.cwiseAbs().maxCoeff() << ")";
        throw std::runtime_error(msg.str());
    }

    SpectralDecomposition dec;
    dec.n = n;
    dec.kappa_sq = kappa_sq;
    dec.sigma.resize(n);
    dec.basis.resize(n, n);
    // Eigen returns ascending order; store descending.
    for (int i = 0; i < n; ++i) {
        dec.sigma[i] = clamp_eigenvalue(eig.eigenvalues()[n - 1 - i], kappa_sq);
        dec.basis.col(i) = eig.eigenvectors().col(n - 1 - i);
    }
    dec.y_hat = dec.basis.transpose() * y;
    return dec;
}

SpectralDecomposition decompose_mercer(const SpectralModel& model, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& y) {
    const int n = static_cast<int>(x.size());
    if (n < 1) throw std::invalid_argument("decompose_mercer: need at least one point");
    if (y.size() != n) throw std::invalid_argument("decompose_mercer: y length must match x");
    const int D = model.dimension();
    const double kappa_sq = model.kappa_sq();

    // G/n = W W^T with W = V diag(sqrt(mu)) / sqrt(n); the D x D matrix W^T W
    // carries the nonzero spectrum.
    Eigen::MatrixXd W = model.basis_matrix(x);
    const Eigen::VectorXd root_mu = model.eigenvalues().cwiseSqrt();
    const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < D; ++j) W.col(j) *= root_mu[j] * inv_root_n;

    Eigen::MatrixXd C(D, D);
    C.setZero();
    C.selfadjointView<Eigen::Lower>().rankUpdate(W.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("decompose_mercer: eigensolver failed");

    // Retain eigenpairs that stay nonzero after clamping; normalize columns
    // with the raw eigenvalues so basis^T basis = I.
    int r = 0;
    for (int i = 0; i < D; ++i)
        if (clamp_eigenvalue(eig.eigenvalues()[i], kappa_sq) > 0.0) ++r;
    r = std::min(r, n);

    SpectralDecomposition dec;
    dec.n = n;
    dec.kappa_sq = kappa_sq;
    dec.sigma.resize(r);
    Eigen::MatrixXd Qs(D, r);
    for (int i = 0; i < r; ++i) {
        const int src = D - 1 - i;  // descending
        const double raw = eig.eigenvalues()[src];
        dec.sigma[i] = clamp_eigenvalue(raw, kappa_sq);
        Qs.col(i) = eig.eigenvectors().col(src) / std::sqrt(raw);
    }
    dec.basis = W * Qs;
    dec.y_hat = dec.basis.transpose() * y;
    return dec;
}

int EstimatorPath::index_of(double lambda) const {
    for (int i = 0; i < static_cast<int>(grid.size()); ++i)
        if (std::abs(grid[i] - lambda) <= 1e-12 * std::max(std::abs(lambda), grid[i])) return i;
    throw std::out_of_range("EstimatorPath: lambda not in grid");
}

EstimatorPath fit_path(const SpectralDecomposition& dec, const FilterFamily& filter,
                       const Eigen::VectorXd& grid) {
    const int L = static_cast<int>(grid.size());
    if (L == 0) throw std::invalid_argument("fit_path: empty grid");
    for (int l = 0; l < L; ++l) {
        if (!(grid[l] > 0.0) || grid[l] > dec.kappa_sq * (1.0 + 1e-12))
            throw std::invalid_argument("fit_path: grid values must lie in (0, kappa^2]");
        if (l > 0 && grid[l] >= grid[l - 1])
            throw std::invalid_argument("fit_path: grid must be strictly descending");
    }
    EstimatorPath path;
    path.grid = grid;
    path.filter = filter;
    path.beta.resize(dec.sigma.size(), L);
    for (int l = 0; l < L; ++l)
        path.beta.col(l) = apply_filter(filter, grid[l], dec.sigma).cwiseProduct(dec.y_hat);
    return path;
}

Eigen::VectorXd predict(const EstimatorPath& path, const SpectralDecomposition& dec,
                        const KernelSpec& kernel, const Eigen::VectorXd& train_x,
                        const Eigen::VectorXd& query_x, double lambda) {
    if (train_x.size() != dec.n) throw std::invalid_argument("predict: train point count mismatch");
    const int l = path.index_of(lambda);
    const Eigen::VectorXd alpha = dec.basis * path.beta.col(l);
    Eigen::VectorXd out(query_x.size());
    for (Eigen::Index k = 0; k < query_x.size(); ++k) {
        double acc = 0.0;
        for (int i = 0; i < dec.n; ++i) acc += alpha[i] * kernel(train_x[i], query_x[k]);
        out[k] = acc / dec.n;
    }
    return out;
}

double weighted_diff_norm(const SpectralDecomposition& dec, const EstimatorPath& path,
                          double lambda, double lambda_prime) {
    const int a = path.index_of(lambda);
    const int b = path.index_of(lambda_prime);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < dec.sigma.size(); ++i) {
        const double d = path.beta(i, a) - path.beta(i, b);
        const double s = dec.sigma[i];
        acc += (s * s + lambda_prime * s) * d * d;
    }
    return std::sqrt(acc / dec.n);
}

double empirical_effective_dimension(const SpectralDecomposition& dec, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("empirical_effective_dimension: lambda must be positive");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < dec.sigma.size(); ++i) acc += dec.sigma[i] / (dec.sigma[i] + lambda);
    return acc;
}

double rkhs_norm_sq(const SpectralDecomposition& dec, const EstimatorPath& path, double lambda) {
    const int l = path.index_of(lambda);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < dec.sigma.size(); ++i)
        acc += dec.sigma[i] * path.beta(i, l) * path.beta(i, l);
    return acc / dec.n;
}

}  // namespace slb
