#include "slb/synthetic.hpp"

#include <cmath>
#include <stdexcept>

namespace slb {

SourceConditionTarget SourceConditionTarget::general(const SpectralModel& model, IndexFunction phi,
                                                     Eigen::VectorXd h_coeffs) {
    const int D = model.dimension();
    if (h_coeffs.size() != D)
        throw std::invalid_argument("SourceConditionTarget: h length must match model dimension");
    if (h_coeffs.squaredNorm() > 1.0 + 1e-12)
        throw std::invalid_argument("SourceConditionTarget: ||h|| must not exceed 1");
    SourceConditionTarget t;
    t.phi = std::move(phi);
    t.h_coeffs = std::move(h_coeffs);
    t.f_onb.resize(D);
    t.f_fun.resize(D);
    for (int j = 0; j < D; ++j) {
        t.f_onb[j] = t.phi(model.eigenvalues()[j]) * t.h_coeffs[j];
        t.f_fun[j] = std::sqrt(model.eigenvalues()[j]) * t.f_onb[j];
    }
    return t;
}

SourceConditionTarget SourceConditionTarget::holder(const SpectralModel& model, double r,
                                                    double h_decay, double h_norm,
                                                    std::optional<std::uint64_t> sign_seed) {
    if (!(r > 0.0)) throw std::invalid_argument("SourceConditionTarget: r must be positive");
    if (!(h_norm > 0.0 && h_norm <= 1.0))
        throw std::invalid_argument("SourceConditionTarget: h_norm must lie in (0,1]");
    const int D = model.dimension();
    Eigen::VectorXd h(D);
    for (int j = 0; j < D; ++j) h[j] = std::pow(static_cast<double>(j + 1), -h_decay);
    if (sign_seed) {
        Rng rng(*sign_seed);
        for (int j = 0; j < D; ++j) h[j] *= rng.sign();
    }
    h *= h_norm / h.norm();
    auto t = general(model, IndexFunction::power(r), std::move(h));
    t.holder_r = r;
    return t;
}

double SourceConditionTarget::f_at(const SpectralModel& model, double x) const {
    double acc = 0.0;
    for (int j = 0; j < model.dimension(); ++j) acc += f_fun[j] * model.basis(j, x);
    return acc;
}

NoiseModel NoiseModel::gaussian(double std_dev) {
    if (!(std_dev >= 0.0)) throw std::invalid_argument("NoiseModel: negative scale");
    return {Kind::gaussian, std_dev};
}
NoiseModel NoiseModel::bounded_uniform(double half_width) {
    if (!(half_width >= 0.0)) throw std::invalid_argument("NoiseModel: negative scale");
    return {Kind::bounded_uniform, half_width};
}
NoiseModel NoiseModel::rademacher(double magnitude) {
    if (!(magnitude >= 0.0)) throw std::invalid_argument("NoiseModel: negative scale");
    return {Kind::rademacher, magnitude};
}

double NoiseModel::sample(Rng& rng) const {
    switch (kind) {
        case Kind::none: return 0.0;
        case Kind::gaussian: return scale * rng.normal();
        case Kind::bounded_uniform: return rng.uniform(-scale, scale);
        case Kind::rademacher: return scale * rng.sign();
    }
    return 0.0;
}

std::pair<double, double> bernstein_constants(const NoiseModel& noise) {
    switch (noise.kind) {
        case NoiseModel::Kind::none: return {0.0, 0.0};
        case NoiseModel::Kind::gaussian: return {noise.scale, noise.scale};
        case NoiseModel::Kind::bounded_uniform:
            return {noise.scale / 1.7320508075688772, noise.scale};
        case NoiseModel::Kind::rademacher: return {noise.scale, noise.scale};
    }
    return {0.0, 0.0};
}

Dataset sample_dataset(const SpectralModel& model, const SourceConditionTarget& target,
                       const NoiseModel& noise, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
    Rng points_rng(derive_seed(seed, 0x706f696e7473ULL));
    Rng noise_rng(derive_seed(seed, 0x6e6f697365ULL));
    Dataset ds;
    ds.x.resize(n);
    ds.y.resize(n);
    ds.f_true.resize(n);
    for (int i = 0; i < n; ++i) ds.x[i] = points_rng.uniform();
    for (int i = 0; i < n; ++i) {
        ds.f_true[i] = target.f_at(model, ds.x[i]);
        ds.y[i] = ds.f_true[i] + noise.sample(noise_rng);
    }
    return ds;
}

double population_effective_dimension(const SpectralModel& model, double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("population_effective_dimension: lambda must be positive");
    // Kahan summation; D can reach several hundred and terms vary widely.
    double sum = 0.0, comp = 0.0;
    for (int j = 0; j < model.dimension(); ++j) {
        const double mu = model.eigenvalues()[j];
        const double term = mu / (mu + lambda) - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum;
}

ExactErrorEvaluator::ExactErrorEvaluator(const SpectralModel& model,
                                         const SourceConditionTarget& target,
                                         const Eigen::VectorXd& train_x)
    : model_(&model), target_(&target), V_(model.basis_matrix(train_x)) {}

ErrorNorms ExactErrorEvaluator::at(const SpectralDecomposition& dec, const EstimatorPath& path,
                                   double lambda) const {
    if (dec.n != V_.rows()) throw std::invalid_argument("ExactErrorEvaluator: sample size mismatch");
    const int l = path.index_of(lambda);
    const Eigen::VectorXd alpha = dec.basis * path.beta.col(l);
    const Eigen::VectorXd proj = V_.transpose() * alpha / dec.n;  // (1/n) sum_i alpha_i e_j(x_i)
    const Eigen::VectorXd& mu = model_->eigenvalues();
    double h2 = 0.0, l2 = 0.0;
    for (int j = 0; j < model_->dimension(); ++j) {
        const double d = target_->f_fun[j] - mu[j] * proj[j];  // function-coefficient error
        l2 += d * d;
        h2 += d * d / mu[j];
    }
    return {std::sqrt(h2), std::sqrt(l2)};
}

ErrorNorms exact_error_norms(const SpectralModel& model, const SourceConditionTarget& target,
                             const SpectralDecomposition& dec, const EstimatorPath& path,
                             double lambda, const Eigen::VectorXd& train_x) {
    return ExactErrorEvaluator(model, target, train_x).at(dec, path, lambda);
}

double rate_oracle(const SpectralModel& model, const SourceConditionTarget& target, double s) {
    if (!(s >= 0.0 && s <= 0.5)) throw std::invalid_argument("rate_oracle: s must lie in [0, 1/2]");
    if (!target.holder_r)
        throw std::invalid_argument("rate_oracle: rate prediction requires a Holder target");
    if (!model.power_exponent())
        throw std::invalid_argument("rate_oracle: rate prediction requires a power-decay spectrum");
    const double r = *target.holder_r;
    const double b = *model.power_exponent();
    return (r + s) / (2.0 * r + 1.0 + b);
}

double delta_function(const SpectralModel& model, const IndexFunction& phi, double lambda) {
    const double p = phi(lambda);
    return lambda * p * p / population_effective_dimension(model, lambda);
}

double delta_inverse(const SpectralModel& model, const IndexFunction& phi, double value,
                     double lambda_lo) {
    double lo = lambda_lo, hi = model.kappa_sq();
    if (value <= delta_function(model, phi, lo)) return lo;
    if (value >= delta_function(model, phi, hi)) return hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (delta_function(model, phi, mid) < value)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace slb
