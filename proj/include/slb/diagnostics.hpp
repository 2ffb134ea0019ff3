#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slb/synthetic.hpp"

namespace slb {

/**
 Operator-deviation quantities between the population operator B = diag(mu)
 and its empirical counterpart B_x, computed exactly in the model's
 D-dimensional orthonormal basis:
   gamma      = ||B - B_x||_HS
   psi        = ||(lambda + B)^{-1/2}(B - B_x)||_HS
   theta      = ||(lambda + B)^{-1/2}(B_x f_rho - T_x* y)||
   effdim_gap = |N(lambda) - N_x(lambda)|
*/
struct DeviationSample {
    double lambda = 0.0;
    double gamma = 0.0;
    double psi = 0.0;
    double theta = 0.0;
    double effdim_gap = 0.0;
    double n_pop = 0.0;  // N(lambda)
    double n_emp = 0.0;  // N_x(lambda)
};

DeviationSample compute_deviations(const SpectralModel& model, const SourceConditionTarget& target,
                                   const Dataset& data, double lambda);

/// B_{n,lambda}(a,b) = (1/sqrt(lambda)) ( a 2 kappa/(sqrt(lambda) n) + b sqrt(N(lambda)/n) ),
/// with the population effective dimension.
double deviation_bound_bnl(double a, double b, double lambda, int n, double kappa_sq, double n_pop);

struct CoverageRow {
    double lambda = 0.0;
    int replicates = 0;
    int viol_gamma = 0;
    int viol_psi = 0;
    int viol_theta = 0;
    int viol_effdim = 0;
    bool effdim_applicable = true;  // requires lambda >= 4 kappa^2 / n
};

/**
 Monte Carlo coverage of the per-lambda high-probability bounds at level eta
 (L = 2 log(8/eta)): fraction of replicates violating each bound must not
 exceed eta; the constants are conservative, so observed fractions are
 expected to be near zero.
*/
std::vector<CoverageRow> coverage_study(const SpectralModel& model,
                                        const SourceConditionTarget& target,
                                        const NoiseModel& noise,
                                        const std::vector<double>& lambda_grid, int n,
                                        int replicates, double eta, std::uint64_t seed,
                                        int threads = 1);

struct PropertyCheckResult {
    double max_violation = 0.0;  // max over trials of lhs - rhs (absolute slack)
    std::uint64_t worst_seed = 0;
    std::string detail;
};

/// ||phi(A) phi(B)^{-1} - I||_HS <= ||A B^{-1} - I||_HS for nondecreasing
/// sublinear phi on random positive definite pairs, plus the scalar form
/// |phi(mu)/phi(nu) - 1| <= |mu/nu - 1|.
PropertyCheckResult check_sublinear_perturbation(int trials, int dim, std::uint64_t seed);

/// ||phi(I+S) phi(I+S_x)^{-1}|| <= (Psi_x + 1)^2 and
/// ||(I+S)^r (I+S_x)^{-r}|| <= (Psi_x + 1)^{2r} for r in {1/4, 1/2, 3/4, 1}.
PropertyCheckResult check_cordes_style(int trials, int dim, std::uint64_t seed);

/// ||(I+S)(I+S_x)^{-1} - I||_HS <= Psi_x + Psi_x^2.
PropertyCheckResult check_zhou_decomposition(int trials, int dim, std::uint64_t seed);

/// ||(A+lambda)^{1/2} h|| <= sqrt(lambda) F  implies  ||A^s h|| <= lambda^s F
/// for s in {0, 1/4, 1/2}.
PropertyCheckResult check_interpolation_tool(int trials, int dim, std::uint64_t seed);

/// ||B^theta f|| <= ||B f||^theta ||f||^{1-theta} for theta in {0, 1/4, 1/2, 3/4, 1}.
PropertyCheckResult check_moment_inequality(int trials, int dim, std::uint64_t seed);

}  // namespace slb
