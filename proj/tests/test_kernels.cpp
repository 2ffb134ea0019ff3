#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "slb/kernels.hpp"
#include "slb/rng.hpp"

using namespace slb;

TEST_CASE("gaussian gram: single point and exact off-diagonal value") {
    const KernelSpec k = KernelSpec::gaussian(1.0);
    Eigen::VectorXd one(1);
    one << 0.0;
    const Eigen::MatrixXd G1 = gram_matrix(k, one);
    CHECK(G1(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

    Eigen::VectorXd two(2);
    two << 0.0, 1.0;
    const Eigen::MatrixXd G2 = gram_matrix(k, two);
    // independent scalar oracle: exp(-1/2)
    const double expected = std::exp(-0.5);
    CHECK(G2(0, 1) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(G2(1, 0) == doctest::Approx(0.6065306597126334).epsilon(1e-12));
    CHECK(G2(0, 0) == 1.0);
}

TEST_CASE("rank-one constant mercer kernel gives all-ones gram") {
    Eigen::VectorXd mu(1);
    mu << 1.0;
    const SpectralModel model(mu);  // e_0 == 1
    const KernelSpec k = KernelSpec::mercer(model);
    Eigen::VectorXd pts(2);
    pts << 0.2, 0.7;
    const Eigen::MatrixXd G = gram_matrix(k, pts);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(G(i, j) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("kernel sup bound") {
    CHECK(kernel_sup_bound(KernelSpec::gaussian(0.37)) == 1.0);

    Eigen::VectorXd mu1(1);
    mu1 << 1.0;
    CHECK(kernel_sup_bound(KernelSpec::mercer(SpectralModel(mu1))) == doctest::Approx(1.0));

    // mu_j = j^{-2}, j = 1..50, pure cosine basis (offset 1); oracle is a dense
    // grid maximization of sum_j 2 j^{-2} cos^2(pi j x)
    Eigen::VectorXd mu(50);
    for (int j = 1; j <= 50; ++j) mu[j - 1] = 1.0 / (j * j);
    const SpectralModel model(mu, 1);
    double oracle = 0.0;
    for (int g = 0; g <= 100000; ++g) {
        const double x = g / 100000.0;
        double v = 0.0;
        for (int j = 1; j <= 50; ++j) {
            const double c = std::cos(M_PI * j * x);
            v += 2.0 * c * c / (j * j);
        }
        oracle = std::max(oracle, v);
    }
    CHECK(kernel_sup_bound(KernelSpec::mercer(model)) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("mercer gram equals V diag(mu) V^T") {
    Rng rng(7);
    Eigen::VectorXd mu(6);
    for (int j = 0; j < 6; ++j) mu[j] = std::pow(j + 1.0, -1.5);
    const SpectralModel model(mu);
    const KernelSpec k = KernelSpec::mercer(model);
    Eigen::VectorXd pts(9);
    for (int i = 0; i < 9; ++i) pts[i] = rng.uniform();
    const Eigen::MatrixXd G = gram_matrix(k, pts);
    const Eigen::MatrixXd V = model.basis_matrix(pts);
    const Eigen::MatrixXd ref = V * mu.asDiagonal() * V.transpose();
    CHECK((G - ref).cwiseAbs().maxCoeff() <= 1e-10 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("gram matrices are near-PSD and permutation-equivariant") {
    Rng rng(42);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 62.0));
        Eigen::VectorXd pts(n);
        for (int i = 0; i < n; ++i) pts[i] = rng.uniform();

        KernelSpec k = KernelSpec::gaussian(0.05 + rng.uniform());
        Eigen::VectorXd mu(8);
        for (int j = 0; j < 8; ++j) mu[j] = std::pow(j + 1.0, -2.0);
        const SpectralModel model(mu);
        if (trial % 2 == 1) k = KernelSpec::mercer(model);

        const Eigen::MatrixXd G = gram_matrix(k, pts);
        const double kappa2 = kernel_sup_bound(k);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * kappa2);

        // reversal permutation
        Eigen::VectorXd rev = pts.reverse();
        const Eigen::MatrixXd Gr = gram_matrix(k, rev);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(Gr(i, j) == G(n - 1 - i, n - 1 - j));
    }
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(KernelSpec::gaussian(0.0), std::invalid_argument);
    CHECK_THROWS_AS(gram_matrix(KernelSpec::gaussian(1.0), Eigen::VectorXd()), std::invalid_argument);
    Eigen::VectorXd bad(1);
    bad << std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(gram_matrix(KernelSpec::gaussian(1.0), bad), std::domain_error);
}
