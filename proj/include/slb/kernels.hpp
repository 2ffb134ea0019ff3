#pragma once

#include <Eigen/Core>

#include "slb/model.hpp"

namespace slb {

/**
 Kernel on the 1-d input domain. Two variants:
   - gaussian(width):   K(x,y) = exp(-(x-y)^2 / (2 width^2)), any real inputs;
   - mercer(model):     truncated expansion of a SpectralModel, inputs in [0,1].
 Immutable; a mercer kernel keeps a (non-owning) reference to its model.
*/
class KernelSpec {
public:
    enum class Kind { gaussian, mercer };

    static KernelSpec gaussian(double width);
    static KernelSpec mercer(const SpectralModel& model);

    Kind kind() const { return kind_; }
    double width() const { return width_; }
    const SpectralModel& model() const { return *model_; }

    double operator()(double x, double y) const;

    /// kappa^2 = sup_x K(x,x). Exact for gaussian; grid-sup for mercer.
    double sup_bound() const;

private:
    Kind kind_;
    double width_ = 1.0;
    const SpectralModel* model_ = nullptr;
};

/// Gram matrix G with G_ij = K(x_i, x_j), exactly symmetric by construction.
/// Throws std::domain_error on a non-finite kernel value.
Eigen::MatrixXd gram_matrix(const KernelSpec& kernel, const Eigen::VectorXd& points);

double kernel_sup_bound(const KernelSpec& kernel);

}  // namespace slb
