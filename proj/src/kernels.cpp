#include "slb/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace slb {

KernelSpec KernelSpec::gaussian(double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian kernel: width must be positive");
    KernelSpec k;
    k.kind_ = Kind::gaussian;
    k.width_ = width;
    return k;
}

KernelSpec KernelSpec::mercer(const SpectralModel& model) {
    KernelSpec k;
    k.kind_ = Kind::mercer;
    k.model_ = &model;
    return k;
}

double KernelSpec::operator()(double x, double y) const {
    if (kind_ == Kind::gaussian) {
        const double d = (x - y) / width_;
        return std::exp(-0.5 * d * d);
    }
    return model_->kernel(x, y);
}

double KernelSpec::sup_bound() const {
    return kind_ == Kind::gaussian ? 1.0 : model_->kappa_sq();
}

Eigen::MatrixXd gram_matrix(const KernelSpec& kernel, const Eigen::VectorXd& points) {
    const int n = static_cast<int>(points.size());
    if (n < 1) throw std::invalid_argument("gram_matrix: need at least one point");
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double v = kernel(points[i], points[j]);
            if (!std::isfinite(v)) throw std::domain_error("gram_matrix: non-finite kernel value");
            G(i, j) = v;
            G(j, i) = v;
        }
    }
    return G;
}

double kernel_sup_bound(const KernelSpec& kernel) { return kernel.sup_bound(); }

}  // namespace slb
