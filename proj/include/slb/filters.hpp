#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

namespace slb {

/**
 Index function: continuous, nondecreasing, phi(0) = 0 on [0, kappa^2].
 May carry a factorization phi = phi1 * phi2 with phi1 Lipschitz (constant
 `lipschitz`) and phi2 sublinear (phi2(t)/t nonincreasing).
*/
struct IndexFunction {
    std::function<double(double)> eval;
    std::string name;

    bool has_split = false;
    std::function<double(double)> phi1, phi2;
    double lipschitz = 0.0;

    double operator()(double t) const { return eval(t); }

    /// t^p for p > 0.
    static IndexFunction power(double p);
    /// identity with the trivial split phi1 = id (Lipschitz 1), phi2 = 1... see impl
    static IndexFunction identity();
};

/// True iff psi covers phi, i.e. psi/phi is nondecreasing along `grid`
/// (relative slack 1e-12). Throws std::domain_error if phi vanishes at an
/// interior grid point.
bool covers(const IndexFunction& phi, const IndexFunction& psi, const std::vector<double>& grid);

struct FilterConstantsReport {
    double max_lambda_g = 0.0;       // sup lambda |g|, compared to gamma_minus1
    double max_residual = 0.0;       // sup |r|, compared to gamma_0
    double max_qualification = 0.0;  // sup |r| psi(t)/psi(lambda), compared to gamma_psi
    double max_interp[3] = {0, 0, 0};  // sup |g| t^r lambda^{1-r} for r in {0, 1/2, 1}, vs gamma_bar
    double worst_lambda = 0.0, worst_t = 0.0;  // location of the worst ratio over all checks
};

/**
 Spectral regularization family g_lambda(t) with residual r_lambda(t) = 1 - t g_lambda(t),
 declared constants and qualification. The constants are classical declarations,
 re-verified numerically by verify_filter_constants.

 Variants:
   tikhonov            g = 1/(t+lambda)
   iterated_tikhonov(m) g = (sum_{i<m} u^i)/(t+lambda), u = lambda/(lambda+t)
   spectral_cutoff     g = 1/t for t >= lambda, else 0
   landweber(p)        lambda is mapped to k = ceil(kappa^2/lambda) iterations
                       of step 1/kappa^2: g = (1-(1-t/kappa^2)^k)/t

 g at t = 0 is defined by its t->0 limit, so clamped zero eigenvalues need no
 special handling by callers.
*/
class FilterFamily {
public:
    enum class Kind { tikhonov, iterated_tikhonov, spectral_cutoff, landweber };

    static FilterFamily tikhonov();
    static FilterFamily iterated_tikhonov(int m);
    static FilterFamily spectral_cutoff();
    /// Landweber with declared polynomial qualification t^p; needs kappa^2 for
    /// the lambda -> iteration-count map.
    static FilterFamily landweber(double kappa_sq, double p = 1.0);

    double g(double lambda, double t) const;
    double residual(double lambda, double t) const;

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double gamma_minus1() const { return gamma_minus1_; }
    double gamma_0() const { return gamma_0_; }
    double gamma_psi() const { return gamma_psi_; }
    const IndexFunction& qualification() const { return psi_; }
    double gamma_bar() const;  // max(gamma_0 + 1, gamma_minus1, gamma_psi)

private:
    Kind kind_ = Kind::tikhonov;
    std::string name_;
    int m_ = 1;             // iterated_tikhonov order
    double p_ = 1.0;        // landweber qualification exponent
    double kappa_sq_ = 1.0; // landweber step scale
    double gamma_minus1_ = 1.0, gamma_0_ = 1.0, gamma_psi_ = 1.0;
    IndexFunction psi_;
};

/// Elementwise g_lambda over a spectrum. Throws std::invalid_argument for lambda <= 0.
Eigen::VectorXd apply_filter(const FilterFamily& filter, double lambda, const Eigen::VectorXd& eigenvalues);

/// Elementwise residual r_lambda over a spectrum.
Eigen::VectorXd residual(const FilterFamily& filter, double lambda, const Eigen::VectorXd& eigenvalues);

/**
 Re-verifies the declared constants on a grid_size x grid_size log-spaced grid
 over (0, kappa^2]^2. Throws std::logic_error naming the offending (lambda, t)
 if any declared constant is exceeded by more than relative 1e-9.
*/
FilterConstantsReport verify_filter_constants(const FilterFamily& filter, double kappa_sq, int grid_size = 200);

}  // namespace slb
