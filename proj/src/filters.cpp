#include "slb/filters.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace slb {

IndexFunction IndexFunction::power(double p) {
    if (!(p > 0.0)) throw std::invalid_argument("IndexFunction::power: p must be positive");
    IndexFunction f;
    f.eval = [p](double t) { return std::pow(t, p); };
    f.name = "t^" + std::to_string(p);
    if (p <= 1.0) {
        // t^p is itself sublinear; trivial split with constant phi1.
        f.has_split = true;
        f.phi1 = [](double) { return 1.0; };
        f.phi2 = f.eval;
        f.lipschitz = 0.0;
    }
    return f;
}

IndexFunction IndexFunction::identity() {
    IndexFunction f;
    f.eval = [](double t) { return t; };
    f.name = "t";
    f.has_split = true;
    f.phi1 = [](double t) { return t; };
    f.phi2 = [](double) { return 1.0; };
    f.lipschitz = 1.0;
    return f;
}

bool covers(const IndexFunction& phi, const IndexFunction& psi, const std::vector<double>& grid) {
    if (grid.size() < 2) throw std::invalid_argument("covers: need at least two grid points");
    double prev = -1.0;
    bool first = true;
    for (double t : grid) {
        const double p = phi(t);
        if (!(p > 0.0)) throw std::domain_error("covers: phi vanishes at grid point");
        const double ratio = psi(t) / p;
        if (!first && ratio < prev * (1.0 - 1e-12)) return false;
        prev = first ? ratio : std::max(prev, ratio);
        first = false;
    }
    return true;
}

FilterFamily FilterFamily::tikhonov() {
    FilterFamily f;
    f.kind_ = Kind::tikhonov;
    f.name_ = "tikhonov";
    f.m_ = 1;
    f.gamma_minus1_ = 1.0;
    f.gamma_0_ = 1.0;
    f.gamma_psi_ = 1.0;
    f.psi_ = IndexFunction::identity();
    return f;
}

FilterFamily FilterFamily::iterated_tikhonov(int m) {
    if (m < 1) throw std::invalid_argument("iterated_tikhonov: m must be >= 1");
    FilterFamily f;
    f.kind_ = Kind::iterated_tikhonov;
    f.name_ = "iterated_tikhonov(" + std::to_string(m) + ")";
    f.m_ = m;
    f.gamma_minus1_ = static_cast<double>(m);
    f.gamma_0_ = 1.0;
    f.gamma_psi_ = 1.0;
    f.psi_ = IndexFunction::power(static_cast<double>(m));
    return f;
}

FilterFamily FilterFamily::spectral_cutoff() {
    FilterFamily f;
    f.kind_ = Kind::spectral_cutoff;
    f.name_ = "spectral_cutoff";
    f.gamma_minus1_ = 1.0;
    f.gamma_0_ = 1.0;
    // Any index function qualifies with constant 1; declare the identity.
    f.gamma_psi_ = 1.0;
    f.psi_ = IndexFunction::identity();
    return f;
}

FilterFamily FilterFamily::landweber(double kappa_sq, double p) {
    if (!(kappa_sq > 0.0)) throw std::invalid_argument("landweber: kappa_sq must be positive");
    if (!(p > 0.0)) throw std::invalid_argument("landweber: p must be positive");
    FilterFamily f;
    f.kind_ = Kind::landweber;
    f.name_ = "landweber(p=" + std::to_string(p) + ")";
    f.kappa_sq_ = kappa_sq;
    f.p_ = p;
    // With k(lambda) = ceil(kappa^2/lambda) iterations, lambda sup|g| = lambda k/kappa^2
    // which approaches 2 from below as lambda -> kappa^2 from below; 1 would be
    // exceeded whenever kappa^2/lambda is fractional.
    f.gamma_minus1_ = 2.0;
    f.gamma_0_ = 1.0;
    f.gamma_psi_ = std::pow(p / 2.718281828459045235360287471353, p);
    f.psi_ = IndexFunction::power(p);
    return f;
}

double FilterFamily::gamma_bar() const {
    return std::max(std::max(gamma_0_ + 1.0, gamma_minus1_), gamma_psi_);
}

double FilterFamily::g(double lambda, double t) const {
    switch (kind_) {
        case Kind::tikhonov:
        case Kind::iterated_tikhonov: {
            // geometric-sum form: g = (sum_{i<m} u^i)/(lambda+t), u = lambda/(lambda+t);
            // equals 1/(lambda+t) bit-for-bit at m = 1 and has the right t->0 limit m/lambda.
            const double u = lambda / (lambda + t);
            double s = 1.0, upow = 1.0;
            for (int i = 1; i < m_; ++i) {
                upow *= u;
                s += upow;
            }
            return s / (lambda + t);
        }
        case Kind::spectral_cutoff:
            return t >= lambda ? 1.0 / t : 0.0;
        case Kind::landweber: {
            const int k = static_cast<int>(std::ceil(kappa_sq_ / lambda));
            const double u = t / kappa_sq_;
            if (t <= 0.0) return static_cast<double>(k) / kappa_sq_;  // t->0 limit
            return (1.0 - std::pow(1.0 - u, k)) / t;
        }
    }
    return 0.0;
}

double FilterFamily::residual(double lambda, double t) const {
    switch (kind_) {
        case Kind::tikhonov:
        case Kind::iterated_tikhonov:
            return std::pow(lambda / (lambda + t), m_);
        case Kind::spectral_cutoff:
            return t >= lambda ? 0.0 : 1.0;
        case Kind::landweber: {
            const int k = static_cast<int>(std::ceil(kappa_sq_ / lambda));
            return std::pow(1.0 - t / kappa_sq_, k);
        }
    }
    return 0.0;
}

namespace {

void check_lambda(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("filter: lambda must be positive");
}

}  // namespace

Eigen::VectorXd apply_filter(const FilterFamily& filter, double lambda, const Eigen::VectorXd& eigenvalues) {
    check_lambda(lambda);
    Eigen::VectorXd out(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) out[i] = filter.g(lambda, eigenvalues[i]);
    return out;
}

Eigen::VectorXd residual(const FilterFamily& filter, double lambda, const Eigen::VectorXd& eigenvalues) {
    check_lambda(lambda);
    Eigen::VectorXd out(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) out[i] = filter.residual(lambda, eigenvalues[i]);
    return out;
}

FilterConstantsReport verify_filter_constants(const FilterFamily& filter, double kappa_sq, int grid_size) {
    if (!(kappa_sq > 0.0)) throw std::invalid_argument("verify_filter_constants: kappa_sq must be positive");
    if (grid_size < 2) throw std::invalid_argument("verify_filter_constants: grid too small");

    const double lo = 1e-6 * kappa_sq;
    std::vector<double> grid(grid_size);
    for (int i = 0; i < grid_size; ++i)
        grid[i] = lo * std::pow(kappa_sq / lo, static_cast<double>(i) / (grid_size - 1));

    FilterConstantsReport rep;
    const IndexFunction& psi = filter.qualification();
    const double slack = 1.0 + 1e-9;
    double worst_ratio = 0.0;

    auto note = [&](double value, double bound, double lam, double t) {
        const double ratio = value / bound;
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            rep.worst_lambda = lam;
            rep.worst_t = t;
        }
        if (value > bound * slack) {
            std::ostringstream msg;
            msg << "filter constant violated for " << filter.name() << " at (lambda=" << lam
                << ", t=" << t << "): value " << value << " > declared " << bound;
            throw std::logic_error(msg.str());
        }
    };

    const double exps[3] = {0.0, 0.5, 1.0};
    for (double lam : grid) {
        const double psi_lam = psi(lam);
        for (double t : grid) {
            const double gv = std::abs(filter.g(lam, t));
            const double rv = std::abs(filter.residual(lam, t));

            const double lg = lam * gv;
            rep.max_lambda_g = std::max(rep.max_lambda_g, lg);
            note(lg, filter.gamma_minus1(), lam, t);

            rep.max_residual = std::max(rep.max_residual, rv);
            note(rv, filter.gamma_0(), lam, t);

            const double qual = rv * psi(t) / psi_lam;
            rep.max_qualification = std::max(rep.max_qualification, qual);
            note(qual, filter.gamma_psi(), lam, t);

            for (int e = 0; e < 3; ++e) {
                const double interp = gv * std::pow(t, exps[e]) * std::pow(lam, 1.0 - exps[e]);
                rep.max_interp[e] = std::max(rep.max_interp[e], interp);
                note(interp, filter.gamma_bar(), lam, t);
            }
        }
    }
    return rep;
}

}  // namespace slb
