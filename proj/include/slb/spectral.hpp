#pragma once

#include <Eigen/Core>

#include "slb/filters.hpp"
#include "slb/kernels.hpp"
#include "slb/model.hpp"

namespace slb {

/**
 Eigendecomposition of the empirical operator through its matrix avatar G/n.
 sigma holds the retained eigenvalues (descending, clamped to [0, kappa^2(1+1e-8)],
 values below 1e-8 kappa^2 treated as zero), basis the matching orthonormal
 eigenvector columns, y_hat = basis^T y.

 decompose() keeps the full n x n basis. decompose_mercer() exploits the rank-D
 structure of a truncated Mercer kernel (G/n = W W^T with W of width D) and
 retains only the nonzero part of the spectrum, which changes no downstream
 quantity: every output weights coordinates by sigma, and estimator functions
 are insensitive to null-space coefficients.
*/
struct SpectralDecomposition {
    int n = 0;                 // sample size
    Eigen::VectorXd sigma;     // descending eigenvalues of G/n (retained part)
    Eigen::MatrixXd basis;     // n x r, orthonormal columns
    Eigen::VectorXd y_hat;     // basis^T y
    double kappa_sq = 1.0;
};

SpectralDecomposition decompose(const Eigen::MatrixXd& G, const Eigen::VectorXd& y, double kappa_sq);

SpectralDecomposition decompose_mercer(const SpectralModel& model, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& y);

/**
 Per-lambda estimator coefficients in the fixed eigenbasis:
 beta^lambda_i = g_lambda(sigma_i) * y_hat_i, one column per grid value.
 alpha^lambda = basis * beta^lambda are the kernel-expansion coefficients of
 f_z^lambda = (1/n) sum_i alpha_i K_{x_i}.
*/
struct EstimatorPath {
    Eigen::VectorXd grid;   // strictly descending lambdas in (0, kappa^2]
    Eigen::MatrixXd beta;   // r x |grid|
    FilterFamily filter;

    /// Index of lambda in the grid (relative tolerance 1e-12); throws
    /// std::out_of_range when absent.
    int index_of(double lambda) const;
};

EstimatorPath fit_path(const SpectralDecomposition& dec, const FilterFamily& filter,
                       const Eigen::VectorXd& grid);

/// f_z^lambda evaluated at arbitrary query points.
Eigen::VectorXd predict(const EstimatorPath& path, const SpectralDecomposition& dec,
                        const KernelSpec& kernel, const Eigen::VectorXd& train_x,
                        const Eigen::VectorXd& query_x, double lambda);

/// || (B_x + lambda')^{1/2} (f_z^lambda - f_z^lambda') ||_H
///   = sqrt( (1/n) sum_i (sigma_i^2 + lambda' sigma_i) (dbeta_i)^2 ),
/// the weighted norm combining empirical and RKHS parts.
double weighted_diff_norm(const SpectralDecomposition& dec, const EstimatorPath& path,
                          double lambda, double lambda_prime);

/// N_x(lambda) = sum_i sigma_i/(sigma_i + lambda); raw trace, no "or 1" guard.
double empirical_effective_dimension(const SpectralDecomposition& dec, double lambda);

/// Squared RKHS norm of f_z^lambda: (1/n) sum_i sigma_i beta_i^2.
double rkhs_norm_sq(const SpectralDecomposition& dec, const EstimatorPath& path, double lambda);

}  // namespace slb
