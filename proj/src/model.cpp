#include "slb/model.hpp"

#include <cmath>
#include <stdexcept>

namespace slb {

double cosine_basis(int j, double x) {
    if (j == 0) return 1.0;
    return 1.4142135623730951 * std::cos(3.141592653589793238462643383279 * j * x);
}

SpectralModel::SpectralModel(Eigen::VectorXd mu, int basis_offset)
    : mu_(std::move(mu)), basis_offset_(basis_offset) {
    if (mu_.size() == 0) throw std::invalid_argument("SpectralModel: empty spectrum");
    if (basis_offset_ < 0) throw std::invalid_argument("SpectralModel: negative basis offset");
    for (Eigen::Index j = 0; j < mu_.size(); ++j) {
        if (!(mu_[j] > 0.0) || !std::isfinite(mu_[j]))
            throw std::invalid_argument("SpectralModel: eigenvalues must be positive and finite");
        if (j > 0 && mu_[j] > mu_[j - 1])
            throw std::invalid_argument("SpectralModel: eigenvalues must be non-increasing");
    }
    compute_kappa_sq();
}

SpectralModel SpectralModel::power_law(int D, double b, double scale, int basis_offset) {
    if (D < 1) throw std::invalid_argument("SpectralModel: D must be >= 1");
    if (!(b > 0.0)) throw std::invalid_argument("SpectralModel: b must be positive");
    if (!(scale > 0.0)) throw std::invalid_argument("SpectralModel: scale must be positive");
    Eigen::VectorXd mu(D);
    for (int j = 0; j < D; ++j) mu[j] = scale * std::pow(static_cast<double>(j + 1), -1.0 / b);
    SpectralModel m(std::move(mu), basis_offset);
    m.power_b_ = b;
    m.power_scale_ = scale;
    return m;
}

Eigen::MatrixXd SpectralModel::basis_matrix(const Eigen::VectorXd& x) const {
    const int n = static_cast<int>(x.size());
    const int D = dimension();
    Eigen::MatrixXd V(n, D);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < D; ++j) V(i, j) = basis(j, x[i]);
    return V;
}

double SpectralModel::kernel(double x, double y) const {
    double acc = 0.0;
    for (int j = 0; j < dimension(); ++j) acc += mu_[j] * basis(j, x) * basis(j, y);
    return acc;
}

std::optional<double> SpectralModel::tail_mass_bound() const {
    if (!power_b_) return std::nullopt;
    const double p = 1.0 / *power_b_;
    const int D = dimension();
    if (p <= 1.0) return std::nullopt;  // divergent tail
    // sum_{j>D} j^{-p} <= integral_D^inf t^{-p} dt = D^{1-p}/(p-1)
    return *power_scale_ * std::pow(static_cast<double>(D), 1.0 - p) / (p - 1.0);
}

void SpectralModel::compute_kappa_sq() {
    // K(x,x) = sum_j mu_j e_j(x)^2; dense scan plus endpoint refinement.
    const int grid = 100000;
    double best = 0.0;
    double best_x = 0.0;
    for (int g = 0; g <= grid; ++g) {
        const double x = static_cast<double>(g) / grid;
        const double v = kernel(x, x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    // local refinement around the best grid point and both endpoints
    for (double center : {best_x, 0.0, 1.0}) {
        double lo = std::max(0.0, center - 1.0 / grid);
        double hi = std::min(1.0, center + 1.0 / grid);
        for (int it = 0; it < 60; ++it) {
            const double m1 = lo + (hi - lo) / 3.0;
            const double m2 = hi - (hi - lo) / 3.0;
            if (kernel(m1, m1) < kernel(m2, m2))
                lo = m1;
            else
                hi = m2;
        }
        best = std::max({best, kernel(lo, lo), kernel(hi, hi)});
    }
    kappa_sq_ = best;
}

}  // namespace slb
