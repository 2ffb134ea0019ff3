#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "slb/kernels.hpp"
#include "slb/rng.hpp"
#include "slb/spectral.hpp"

using namespace slb;

namespace {

// dense matrix-function oracle: g_lambda(G/n) y and friends in original coordinates
struct DenseOracle {
    Eigen::MatrixXd B;  // G/n
    Eigen::VectorXd y;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;

    DenseOracle(const Eigen::MatrixXd& G, const Eigen::VectorXd& y_in)
        : B(G / G.rows()), y(y_in), eig(B) {}

    Eigen::VectorXd alpha(const FilterFamily& f, double lam) const {
        Eigen::VectorXd d = eig.eigenvalues();
        for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = f.g(lam, std::max(d[i], 0.0));
        return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose() * y;
    }
};

Eigen::MatrixXd random_gram(int n, Rng& rng, double width) {
    Eigen::VectorXd pts(n);
    for (int i = 0; i < n; ++i) pts[i] = rng.uniform();
    return gram_matrix(KernelSpec::gaussian(width), pts);
}

}  // namespace

TEST_CASE("decompose: identity and rank-one hand oracles") {
    SUBCASE("identity gram") {
        Eigen::MatrixXd G = Eigen::MatrixXd::Identity(2, 2);
        Eigen::VectorXd y(2);
        y << 1.0, 2.0;
        const SpectralDecomposition dec = decompose(G, y, 1.0);
        CHECK(dec.sigma[0] == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(dec.sigma[1] == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("all-ones gram, 2x2 hand eigendecomposition") {
        Eigen::MatrixXd G = Eigen::MatrixXd::Ones(2, 2);
        Eigen::VectorXd y(2);
        y << 1.0, 1.0;
        const SpectralDecomposition dec = decompose(G, y, 1.0);
        CHECK(dec.sigma[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(dec.sigma[1] == doctest::Approx(0.0));
        CHECK(std::abs(dec.y_hat[0]) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
        CHECK(std::abs(dec.y_hat[1]) == doctest::Approx(0.0));
    }
    SUBCASE("rank-one mercer kernel has exactly one nonzero eigenvalue") {
        Eigen::VectorXd mu(1);
        mu << 1.0;
        const SpectralModel model(mu);
        Rng rng(5);
        Eigen::VectorXd x(7), y(7);
        for (int i = 0; i < 7; ++i) {
            x[i] = rng.uniform();
            y[i] = rng.normal();
        }
        const Eigen::MatrixXd G = gram_matrix(KernelSpec::mercer(model), x);
        const SpectralDecomposition dec = decompose(G, y, model.kappa_sq());
        int nonzero = 0;
        for (Eigen::Index i = 0; i < dec.sigma.size(); ++i)
            if (dec.sigma[i] > 0.0) ++nonzero;
        CHECK(nonzero == 1);
    }
}

TEST_CASE("decomposition type invariants on random instances") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform(0.0, 14.0));
        const Eigen::MatrixXd G = random_gram(n, rng, 0.1 + rng.uniform());
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = rng.normal();
        const SpectralDecomposition dec = decompose(G, y, 1.0);

        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
        CHECK((dec.basis.transpose() * dec.basis - I).cwiseAbs().maxCoeff() <= 1e-8);
        for (int i = 1; i < n; ++i) CHECK(dec.sigma[i] <= dec.sigma[i - 1]);
        CHECK(dec.sigma.minCoeff() >= 0.0);
        CHECK(dec.sigma.maxCoeff() <= 1.0 * (1.0 + 1e-8));
        const Eigen::MatrixXd rec = dec.basis * dec.sigma.asDiagonal() * dec.basis.transpose();
        CHECK((rec - G / n).cwiseAbs().maxCoeff() <= 1e-7);
    }
}

TEST_CASE("decompose rejects malformed input") {
    Eigen::MatrixXd G(2, 2);
    G << 1.0, 0.5, -0.5, 1.0;  // not symmetric
    Eigen::VectorXd y(2);
    y << 1.0, 1.0;
    CHECK_THROWS_AS(decompose(G, y, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(decompose(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(3), 1.0),
                    std::invalid_argument);
}

TEST_CASE("fit_path spectral examples") {
    // sigma = (1), y_hat = (2): tikhonov at lambda=1 gives beta = 1
    Eigen::MatrixXd G(1, 1);
    G << 1.0;
    Eigen::VectorXd y(1);
    y << 2.0;
    const SpectralDecomposition dec = decompose(G, y, 1.0);
    Eigen::VectorXd grid(1);
    grid << 1.0;
    const EstimatorPath path = fit_path(dec, FilterFamily::tikhonov(), grid);
    CHECK(path.beta(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

    // spectral cutoff below threshold zeroes the coefficient
    Eigen::MatrixXd G2(1, 1);
    G2 << 0.4;
    const SpectralDecomposition dec2 = decompose(G2, y, 1.0);
    Eigen::VectorXd grid2(1);
    grid2 << 0.5;
    const EstimatorPath path2 = fit_path(dec2, FilterFamily::spectral_cutoff(), grid2);
    CHECK(path2.beta(0, 0) == 0.0);

    // 2x2 all-ones gram, tikhonov lambda = 0.5: beta = (sqrt2/1.5, 0)
    Eigen::MatrixXd G3 = Eigen::MatrixXd::Ones(2, 2);
    Eigen::VectorXd y3(2);
    y3 << 1.0, 1.0;
    const SpectralDecomposition dec3 = decompose(G3, y3, 1.0);
    Eigen::VectorXd grid3(1);
    grid3 << 0.5;
    const EstimatorPath path3 = fit_path(dec3, FilterFamily::tikhonov(), grid3);
    CHECK(std::abs(path3.beta(0, 0)) == doctest::Approx(std::sqrt(2.0) / 1.5).epsilon(1e-12));
    CHECK(std::abs(path3.beta(1, 0)) <= 1e-12);

    CHECK_THROWS_AS(fit_path(dec, FilterFamily::tikhonov(), Eigen::VectorXd()), std::invalid_argument);
    Eigen::VectorXd ascending(2);
    ascending << 0.25, 0.5;
    CHECK_THROWS_AS(fit_path(dec, FilterFamily::tikhonov(), ascending), std::invalid_argument);
}

TEST_CASE("fit_path equals dense matrix-function evaluation (n <= 16)") {
    Rng rng(1234);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 15.0));
        const Eigen::MatrixXd G = random_gram(n, rng, 0.2 + rng.uniform());
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = rng.normal();
        const SpectralDecomposition dec = decompose(G, y, 1.0);
        const DenseOracle oracle(G, y);

        const FilterFamily f = (trial % 2) ? FilterFamily::tikhonov() : FilterFamily::iterated_tikhonov(2);
        Eigen::VectorXd grid(3);
        grid << 0.9, 0.3, 0.05;
        const EstimatorPath path = fit_path(dec, f, grid);
        for (int l = 0; l < 3; ++l) {
            const Eigen::VectorXd alpha = dec.basis * path.beta.col(l);
            const Eigen::VectorXd ref = oracle.alpha(f, grid[l]);
            CHECK((alpha - ref).norm() <= 1e-9 * std::max(1.0, ref.norm()));
        }
    }
}

TEST_CASE("predict: linearity, rank-one reduction, training-point identity") {
    SUBCASE("zero outputs give zero predictions") {
        Rng rng(3);
        Eigen::VectorXd x(6);
        for (int i = 0; i < 6; ++i) x[i] = rng.uniform();
        const KernelSpec k = KernelSpec::gaussian(0.5);
        const SpectralDecomposition dec = decompose(gram_matrix(k, x), Eigen::VectorXd::Zero(6), 1.0);
        Eigen::VectorXd grid(1);
        grid << 0.5;
        const EstimatorPath path = fit_path(dec, FilterFamily::tikhonov(), grid);
        Eigen::VectorXd q(2);
        q << 0.1, 0.9;
        CHECK(predict(path, dec, k, x, q, 0.5).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("rank-one constant kernel predicts c sigma1/(sigma1+lambda)") {
        Eigen::VectorXd mu(1);
        mu << 1.0;
        const SpectralModel model(mu);
        const KernelSpec k = KernelSpec::mercer(model);
        const double c = 3.25, lam = 0.4;
        Eigen::VectorXd x(5);
        x << 0.1, 0.3, 0.5, 0.7, 0.9;
        const SpectralDecomposition dec = decompose(gram_matrix(k, x), Eigen::VectorXd::Constant(5, c), 1.0);
        Eigen::VectorXd grid(1);
        grid << lam;
        const EstimatorPath path = fit_path(dec, FilterFamily::tikhonov(), grid);
        Eigen::VectorXd q(1);
        q << 0.42;
        CHECK(predict(path, dec, k, x, q, lam)[0] == doctest::Approx(c / (1.0 + lam)).epsilon(1e-12));
    }
    SUBCASE("prediction at a training point matches U diag(sigma) beta") {
        Rng rng(17);
        Eigen::VectorXd x(8), y(8);
        for (int i = 0; i < 8; ++i) {
            x[i] = rng.uniform();
            y[i] = rng.normal();
        }
        const KernelSpec k = KernelSpec::gaussian(0.3);
        const SpectralDecomposition dec = decompose(gram_matrix(k, x), y, 1.0);
        Eigen::VectorXd grid(1);
        grid << 0.2;
        const EstimatorPath path = fit_path(dec, FilterFamily::tikhonov(), grid);
        const Eigen::VectorXd at_train = predict(path, dec, k, x, x, 0.2);
        const Eigen::VectorXd ref = dec.basis * dec.sigma.asDiagonal() * path.beta.col(0);
        CHECK((at_train - ref).cwiseAbs().maxCoeff() <= 1e-10);

        CHECK_THROWS_AS(predict(path, dec, k, x, x, 0.123), std::out_of_range);
    }
}

TEST_CASE("weighted_diff_norm: trivial, rank-one, dense oracle") {
    SUBCASE("identical lambdas give zero") {
        Eigen::MatrixXd G = Eigen::MatrixXd::Identity(3, 3);
        Eigen::VectorXd y(3);
        y << 1.0, -2.0, 0.5;
        const SpectralDecomposition dec = decompose(G, y, 1.0);
        Eigen::VectorXd grid(2);
        grid << 0.5, 0.25;
        const EstimatorPath path = fit_path(dec, FilterFamily::tikhonov(), grid);
        CHECK(weighted_diff_norm(dec, path, 0.5, 0.5) == 0.0);
    }
    SUBCASE("rank-one closed form") {
        Eigen::MatrixXd G(1, 1);
        G << 0.8;
        Eigen::VectorXd y(1);
        y << 1.5;
        const SpectralDecomposition dec = decompose(G, y, 1.0);
        Eigen::VectorXd grid(2);
        grid << 0.5, 0.125;
        const EstimatorPath path = fit_path(dec, FilterFamily::tikhonov(), grid);
        const double s = dec.sigma[0];
        const double d = path.beta(0, 0) - path.beta(0, 1);
        const double lam_p = 0.125;
        CHECK(weighted_diff_norm(dec, path, 0.5, 0.125) ==
              doctest::Approx(std::sqrt((s * s + lam_p * s) * d * d / 1.0)).epsilon(1e-14));
    }
    SUBCASE("5x5 dense two-norm oracle at 1e-10 relative") {
        Rng rng(2718);
        for (int trial = 0; trial < 30; ++trial) {
            const int n = 5;
            const Eigen::MatrixXd G = random_gram(n, rng, 0.15 + 0.5 * rng.uniform());
            Eigen::VectorXd y(n);
            for (int i = 0; i < n; ++i) y[i] = rng.normal();
            const SpectralDecomposition dec = decompose(G, y, 1.0);
            Eigen::VectorXd grid(2);
            grid << 0.6, 0.07;
            const EstimatorPath path = fit_path(dec, FilterFamily::tikhonov(), grid);

            const Eigen::VectorXd a0 = dec.basis * path.beta.col(0);
            const Eigen::VectorXd a1 = dec.basis * path.beta.col(1);
            const Eigen::VectorXd da = a0 - a1;
            const Eigen::VectorXd vals = G * da / n;  // difference evaluated at the sample
            const double emp = vals.squaredNorm() / n;
            const double rkhs = da.dot(G * da) / (static_cast<double>(n) * n);
            const double oracle = std::sqrt(emp + grid[1] * rkhs);
            const double fast = weighted_diff_norm(dec, path, grid[0], grid[1]);
            CHECK(fast == doctest::Approx(oracle).epsilon(1e-10));
        }
    }
}

TEST_CASE("empirical effective dimension") {
    Eigen::MatrixXd G(2, 2);
    G << 2.0, 0.0, 0.0, 1.0;  // G/n has eigenvalues 1, 0.5
    Eigen::VectorXd y(2);
    y << 0.0, 0.0;
    const SpectralDecomposition dec = decompose(G, y, 1.5);
    CHECK(empirical_effective_dimension(dec, 0.5) == doctest::Approx(7.0 / 6.0).epsilon(1e-14));
    // large-lambda bound N_x <= tr(G/n)/lambda, and zero spectrum gives zero
    CHECK(empirical_effective_dimension(dec, 1e6) <= 1.5 / 1e6 + 1e-18);
    SpectralDecomposition zero = dec;
    zero.sigma.setZero();
    CHECK(empirical_effective_dimension(zero, 0.123) == 0.0);
    CHECK_THROWS_AS(empirical_effective_dimension(dec, 0.0), std::invalid_argument);
}

TEST_CASE("effective-dimension and isometry invariants on random instances") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 30.0));
        const Eigen::MatrixXd G = random_gram(n, rng, 0.1 + rng.uniform());
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = rng.normal();
        const SpectralDecomposition dec = decompose(G, y, 1.0);

        // N_x(lambda/q) <= q N_x(lambda)
        const double lam = std::pow(10.0, rng.uniform(-4.0, 0.0));
        const double q = 1.0 + 9.0 * rng.uniform();
        CHECK(empirical_effective_dimension(dec, lam / q) <=
              q * empirical_effective_dimension(dec, lam) * (1.0 + 1e-12));

        // monotone on a decreasing grid
        double prev = -1.0;
        for (int i = 0; i < 12; ++i) {
            const double v = empirical_effective_dimension(dec, 1.0 / std::pow(2.0, i));
            CHECK(v >= prev - 1e-12);
            prev = v;
        }

        // empirical isometry: g in span{K_{x_i}}, (1/n) sum g(x_i)^2 = ||B_x^{1/2} g||^2
        Eigen::VectorXd coef(n);
        for (int i = 0; i < n; ++i) coef[i] = rng.normal();
        const Eigen::VectorXd beta = dec.basis.transpose() * coef;  // spectral coordinates
        const Eigen::VectorXd vals = G * coef / n;                  // g(x_k) for alpha = coef
        const double lhs = vals.squaredNorm() / n;
        double rhs = 0.0;
        for (int i = 0; i < n; ++i) rhs += dec.sigma[i] * dec.sigma[i] * beta[i] * beta[i];
        rhs /= n;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("moment inequality for the diagonalized empirical operator") {
    Rng rng(77);
    const double thetas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4 + static_cast<int>(rng.uniform(0.0, 12.0));
        const Eigen::MatrixXd G = random_gram(n, rng, 0.3);
        Eigen::VectorXd f(n);
        for (int i = 0; i < n; ++i) f[i] = rng.normal();
        const SpectralDecomposition dec = decompose(G, Eigen::VectorXd::Zero(n), 1.0);
        const Eigen::VectorXd fb = dec.basis.transpose() * f;
        for (double th : thetas) {
            double lhs = 0.0, bf = 0.0;
            for (int i = 0; i < n; ++i) {
                lhs += std::pow(dec.sigma[i], 2.0 * th) * fb[i] * fb[i];
                bf += dec.sigma[i] * dec.sigma[i] * fb[i] * fb[i];
            }
            CHECK(std::sqrt(lhs) <=
                  std::pow(std::sqrt(bf), th) * std::pow(fb.norm(), 1.0 - th) * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("low-rank mercer decomposition agrees with the dense route") {
    Rng rng(404);
    Eigen::VectorXd mu(10);
    for (int j = 0; j < 10; ++j) mu[j] = std::pow(j + 1.0, -2.0);
    const SpectralModel model(mu);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 6 + static_cast<int>(rng.uniform(0.0, 20.0));
        Eigen::VectorXd x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = rng.uniform();
            y[i] = rng.normal();
        }
        const SpectralDecomposition fast = decompose_mercer(model, x, y);
        const SpectralDecomposition dense =
            decompose(gram_matrix(KernelSpec::mercer(model), x), y, model.kappa_sq());

        const int r = static_cast<int>(fast.sigma.size());
        CHECK(r <= std::min(n, 10));
        for (int i = 0; i < r; ++i)
            CHECK(fast.sigma[i] == doctest::Approx(dense.sigma[i]).epsilon(1e-8));
        // orthonormal retained basis
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(r, r);
        CHECK((fast.basis.transpose() * fast.basis - I).cwiseAbs().maxCoeff() <= 1e-8);

        // same estimator path outputs through either decomposition
        Eigen::VectorXd grid(2);
        grid << 0.8 * model.kappa_sq(), 0.1 * model.kappa_sq();
        const EstimatorPath pf = fit_path(fast, FilterFamily::tikhonov(), grid);
        const EstimatorPath pd = fit_path(dense, FilterFamily::tikhonov(), grid);
        CHECK(weighted_diff_norm(fast, pf, grid[0], grid[1]) ==
              doctest::Approx(weighted_diff_norm(dense, pd, grid[0], grid[1])).epsilon(1e-9));
        CHECK(rkhs_norm_sq(fast, pf, grid[1]) ==
              doctest::Approx(rkhs_norm_sq(dense, pd, grid[1])).epsilon(1e-9));
        CHECK(empirical_effective_dimension(fast, 0.05) ==
              doctest::Approx(empirical_effective_dimension(dense, 0.05)).epsilon(1e-9));
    }
}
