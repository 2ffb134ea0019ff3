#pragma once

#include <Eigen/Core>
#include <optional>

namespace slb {

/// Orthonormal cosine family on [0,1] under the uniform measure:
/// e_0(x) = 1, e_j(x) = sqrt(2) cos(pi j x) for j >= 1.
double cosine_basis(int j, double x);

/**
 Explicit Mercer ground-truth model on [0,1]: a finite spectral expansion
 K(x,y) = sum_{j<D} mu_j e_j(x) e_j(y) with the cosine basis, so that every
 population quantity (covariance operator, effective dimension, error norms)
 is an exact finite sum.

 Eigenpair j (0-based) is attached to basis index j + basis_offset; the
 offset lets a model skip the constant function.
*/
class SpectralModel {
public:
    /// mu must be positive and non-increasing.
    explicit SpectralModel(Eigen::VectorXd mu, int basis_offset = 0);

    /// mu_j = scale * j^{-1/b} for j = 1..D. With this convention the
    /// effective dimension satisfies N(lambda) = Theta(lambda^{-b}).
    static SpectralModel power_law(int D, double b, double scale = 1.0, int basis_offset = 0);

    int dimension() const { return static_cast<int>(mu_.size()); }
    const Eigen::VectorXd& eigenvalues() const { return mu_; }
    int basis_offset() const { return basis_offset_; }

    /// Model basis function j (0-based eigenpair index) evaluated at x.
    double basis(int j, double x) const { return cosine_basis(j + basis_offset_, x); }

    /// n x D matrix of basis values, V(i,j) = e_{j+offset}(x_i).
    Eigen::MatrixXd basis_matrix(const Eigen::VectorXd& x) const;

    double kernel(double x, double y) const;

    /// sup_x K(x,x), located by a dense grid scan with endpoint refinement.
    double kappa_sq() const { return kappa_sq_; }

    double trace() const { return mu_.sum(); }

    /// Integral upper bound on the discarded tail sum_{j>D} scale*j^{-1/b};
    /// only meaningful for power-law models.
    std::optional<double> tail_mass_bound() const;

    /// Power-decay exponent b if constructed via power_law.
    std::optional<double> power_exponent() const { return power_b_; }

private:
    Eigen::VectorXd mu_;
    int basis_offset_ = 0;
    double kappa_sq_ = 0.0;
    std::optional<double> power_b_;
    std::optional<double> power_scale_;

    void compute_kappa_sq();
};

}  // namespace slb
