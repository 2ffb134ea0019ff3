#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "slb/filters.hpp"
#include "slb/model.hpp"
#include "slb/rng.hpp"
#include "slb/spectral.hpp"

namespace slb {

/**
 Source-condition target f_rho = phi(B) h with ||h||_H <= 1.
 h_coeffs are the coordinates of h in the RKHS orthonormal basis
 {sqrt(mu_j) e_j}, so ||h||^2 = sum h_j^2. The target's coordinates:
   ONB coords       f_onb_j = phi(mu_j) h_j,
   function coords  f_fun_j = sqrt(mu_j) f_onb_j   (f_rho = sum_j f_fun_j e_j).
*/
struct SourceConditionTarget {
    IndexFunction phi;
    Eigen::VectorXd h_coeffs;
    Eigen::VectorXd f_onb;
    Eigen::VectorXd f_fun;
    std::optional<double> holder_r;  // set when phi(t) = t^r

    static SourceConditionTarget general(const SpectralModel& model, IndexFunction phi,
                                         Eigen::VectorXd h_coeffs);

    /// Holder target phi(t) = t^r with the default coefficient profile
    /// h_j proportional to j^{-h_decay}, normalized to ||h|| = h_norm,
    /// optionally with a seeded random sign pattern.
    static SourceConditionTarget holder(const SpectralModel& model, double r, double h_decay = 1.0,
                                        double h_norm = 0.99,
                                        std::optional<std::uint64_t> sign_seed = std::nullopt);

    double f_at(const SpectralModel& model, double x) const;
};

struct NoiseModel {
    enum class Kind { none, gaussian, bounded_uniform, rademacher };
    Kind kind = Kind::none;
    double scale = 0.0;  // std / half-width / magnitude

    static NoiseModel none() { return {Kind::none, 0.0}; }
    static NoiseModel gaussian(double std_dev);
    static NoiseModel bounded_uniform(double half_width);
    static NoiseModel rademacher(double magnitude);

    double sample(Rng& rng) const;
};

/// Bernstein pair (sigma, M) valid for the noise variant:
/// gaussian(s) -> (s, s); bounded_uniform(a) -> (a/sqrt(3), a); rademacher(a) -> (a, a).
std::pair<double, double> bernstein_constants(const NoiseModel& noise);

struct Dataset {
    Eigen::VectorXd x;       // design points, i.i.d. Uniform[0,1]
    Eigen::VectorXd y;       // f_rho(x_i) + eps_i
    Eigen::VectorXd f_true;  // f_rho(x_i)
};

/// Deterministic given seed; the generator stream is split as
/// (points | noise) so the design is unchanged by the noise variant.
Dataset sample_dataset(const SpectralModel& model, const SourceConditionTarget& target,
                       const NoiseModel& noise, int n, std::uint64_t seed);

/// N(lambda) = sum_j mu_j / (mu_j + lambda), compensated summation.
double population_effective_dimension(const SpectralModel& model, double lambda);

struct ErrorNorms {
    double rkhs;  // ||f_rho - f_z^lambda||_H
    double l2;    // ||f_rho - f_z^lambda||_{L2(rho_X)} = ||B^{1/2}(...)||_H
};

/**
 Exact population error norms of the estimator at a path grid value. Expands
 f_z^lambda in the model basis (exact for a Mercer kernel of the same model):
 chat_j = mu_j (1/n) sum_i alpha_i e_j(x_i). Precomputes the basis matrix once;
 use `at` per lambda.
*/
class ExactErrorEvaluator {
public:
    ExactErrorEvaluator(const SpectralModel& model, const SourceConditionTarget& target,
                        const Eigen::VectorXd& train_x);

    ErrorNorms at(const SpectralDecomposition& dec, const EstimatorPath& path, double lambda) const;

private:
    const SpectralModel* model_;
    const SourceConditionTarget* target_;
    Eigen::MatrixXd V_;  // n x D basis values at the training points
};

/// One-shot convenience form of ExactErrorEvaluator::at.
ErrorNorms exact_error_norms(const SpectralModel& model, const SourceConditionTarget& target,
                             const SpectralDecomposition& dec, const EstimatorPath& path,
                             double lambda, const Eigen::VectorXd& train_x);

/// Predicted n-exponent (r+s)/(2r+1+b) of ||B^s(f_rho - f-hat)|| for a Holder
/// target over a power-decay spectrum; throws std::invalid_argument otherwise.
double rate_oracle(const SpectralModel& model, const SourceConditionTarget& target, double s);

/// Delta(lambda) = lambda phi(lambda)^2 / N(lambda), strictly increasing.
double delta_function(const SpectralModel& model, const IndexFunction& phi, double lambda);

/// Numeric inverse of Delta by bisection on (lambda_lo, kappa^2].
double delta_inverse(const SpectralModel& model, const IndexFunction& phi, double value,
                     double lambda_lo = 1e-12);

}  // namespace slb
