#pragma once

#include <functional>
#include <vector>

#include "slb/spectral.hpp"

namespace slb {

enum class ConstantMode { theory, scaled };

/// Which lambda-grid rule build_data_grid applies. `auto_rule` follows the
/// constant mode: theory keeps the deterministic-constant grid
///   { lambda : lambda >= 100 kappa^2 ell^2/n  and  lambda >= 3 kappa^2 (N_x or 1)/n },
/// scaled keeps the geometric structure but replaces the union-bound constants
/// by the rule's own order-one region
///   { lambda : c * sqrt(lambda) S_x(lambda) <= 1  and  lambda >= kappa^2/n^2 },
/// where c is the comparison constant in use. The override exists so the two
/// constant modes can be compared on identical grids.
enum class GridRule { auto_rule, theory, order_one };

struct BalancingConfig {
    double q = 2.0;              // geometric grid ratio, > 1
    double eta = 0.1;            // failure probability, in (0,1)
    double sigma_noise = 0.0;    // Bernstein sigma (assumed known), > 0
    double bernstein_M = 0.0;    // Bernstein M (assumed known), > 0
    double gamma_bar = 2.0;      // max(gamma_0+1, gamma_-1, gamma_psi) of the filter
    ConstantMode constant_mode = ConstantMode::scaled;
    double c_user = 1.0;         // scaled-mode comparison constant
    GridRule grid_rule = GridRule::auto_rule;
    double lambda_max = 1.0;     // = kappa^2

    void validate() const;  // throws std::invalid_argument

    /// The full multiplier of sqrt(lambda') S_x(lambda') in the comparison rule:
    /// 64 gamma_bar ell_{eta,n} in theory mode, c_user in scaled mode.
    double threshold_multiplier(int n) const;

    GridRule effective_grid_rule() const {
        if (grid_rule != GridRule::auto_rule) return grid_rule;
        return constant_mode == ConstantMode::theory ? GridRule::theory : GridRule::order_one;
    }
};

/// ell_{eta,n} = 2 log( 8 log(n) / (eta log q) ). Validates n >= 3, q > 1,
/// eta in (0,1); the returned value may be below 1, callers needing ell >= 1
/// must check.
double ell_eta_n(int n, double eta, double q);

/// S_x(n, lambda) = (sigma sqrt(2 (N_x(lambda) or 1)) + M/5) / sqrt(lambda n).
double estimation_term_empirical(const SpectralDecomposition& dec, double lambda, int n,
                                 double sigma, double M);

/// Data-dependent grid Lambda_x (descending, possibly empty) built from an
/// effective-dimension oracle; the overload reads N_x off a decomposition.
std::vector<double> build_data_grid(const std::function<double(double)>& effective_dimension,
                                    double kappa_sq, int n, const BalancingConfig& config);
std::vector<double> build_data_grid(const SpectralDecomposition& dec, double kappa_sq, int n,
                                    const BalancingConfig& config);

struct Comparison {
    double lambda, lambda_prime;
    double lhs;   // pair norm
    double rhs;   // threshold
    bool pass;
};

struct AbstractSelection {
    double lambda_hat = 0.0;
    std::vector<double> member_set;   // descending
    std::vector<Comparison> comparisons;
};

/**
 Deterministic balancing rule: over a descending grid, the member set is
   { lambda : pair_norm(lambda, lambda') <= 4 C sqrt(lambda') S(lambda')
              for every grid lambda' <= lambda },
 and lambda_hat = max member. The grid minimum is always a member. Validates
 that lambda -> sqrt(lambda) S(lambda) is nonincreasing along the grid.
*/
AbstractSelection abstract_select(const std::vector<double>& grid,
                                  const std::function<double(double, double)>& pair_norm,
                                  const std::function<double(double)>& S, double C);

struct BalancingOutcome {
    double lambda_hat = 0.0;
    std::vector<double> grid;         // Lambda_x actually used
    std::vector<double> member_set;
    std::vector<Comparison> comparisons;
    bool empty_grid_flag = false;
    double threshold_constant = 0.0;  // multiplier of sqrt(lambda') S_x(lambda')
};

/**
 Fully data-driven selection: pair norms are weighted_diff_norm, thresholds are
 threshold_multiplier(n) * sqrt(lambda') S_x(lambda'), restricted to the grid
 `lambda_grid` (normally the build_data_grid output; must be a subset of the
 fitted path's grid). An empty grid yields the kappa^2 sentinel with
 empty_grid_flag set.
*/
BalancingOutcome select_data_driven(const SpectralDecomposition& dec, const EstimatorPath& path,
                                    const std::vector<double>& lambda_grid, double kappa_sq, int n,
                                    const BalancingConfig& config);

/// Convenience overload that builds Lambda_x itself and requires path.grid to
/// cover it.
BalancingOutcome select_data_driven(const SpectralDecomposition& dec, const EstimatorPath& path,
                                    double kappa_sq, int n, const BalancingConfig& config);

/// lambda* = max( { lambda in grid : A(lambda) <= S(lambda) } U { grid min } ).
/// Test-side oracle for when the approximation term A is known.
double lambda_star(const std::vector<double>& grid, const std::function<double(double)>& A,
                   const std::function<double(double)>& S);

/// Deterministic lower grid end from the population effective dimension:
/// q * min{ lambda in {kappa^2 q^-i} : lambda >= 100 kappa^2 ell^2/n and
///          lambda >= 6 kappa^2 (N(lambda) or 1)/n }.
/// Requires n >= max(100 ell^2, 6).
double theoretical_lambda_min(const std::function<double(double)>& effective_dimension,
                              double kappa_sq, int n, double q, double eta);

}  // namespace slb
