#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <utility>

#include "slowmotion/spectral.hpp"

using namespace slowmotion;

namespace {
const double pi = std::acos(-1.0);

Field random_interior(const Grid& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Field f(g);
    for (std::size_t i = 1; i + 1 < f.size(); ++i) f[i] = U(rng);
    return f;
}
}  // namespace

TEST(Assemble, ZeroStateIsScaledLaplacianPlusIdentity) {
    const Grid g(1.0, 99);
    const auto op = assemble(0.1, Field(g), burgers_flux());
    const double c = 0.1 / (g.dx() * g.dx());
    for (std::size_t r = 0; r < op.matrix.size(); ++r) EXPECT_NEAR(op.matrix.diag[r], -2.0 * c + 1.0, 1e-9);
    for (std::size_t r = 0; r + 1 < op.matrix.size(); ++r) {
        EXPECT_NEAR(op.matrix.lower[r], c, 1e-9);
        EXPECT_NEAR(op.matrix.upper[r], c, 1e-9);
    }
    EXPECT_THROW(assemble(0.1, Field(Grid(1.0, 30)), burgers_flux()), Error);
}

TEST(Assemble, MatchesTheDirectionalDerivativeOfTheResidual) {
    const Grid g(2.0, 400);
    const double eps = 0.05;
    for (const FluxFunction& f : {burgers_flux(), power_flux(3.0)}) {
        const auto s = approx_state(eps, 0.7, g);
        const auto op = assemble(eps, s, f);
        const Field v = random_interior(g, 3);
        const double h = 1e-6;
        const Field fd = (1.0 / (2.0 * h)) * (stationary_residual(s.field + h * v, eps, f) -
                                             stationary_residual(s.field - h * v, eps, f));
        const Field lv = apply(op, v);
        for (std::size_t i = 1; i + 1 < g.size(); ++i) EXPECT_NEAR(lv[i], fd[i], 1e-5 * (1.0 + std::abs(lv[i]))) << i;
    }
}

TEST(Eigensolve, DiscreteSineSpectrumAtTheZeroState) {
    const Grid g(1.0, 399);
    const double eps = 0.1;
    const auto sd = eigensolve(assemble(eps, Field(g), burgers_flux()), 5);
    ASSERT_EQ(sd.lambdas.size(), 5u);
    EXPECT_FALSE(sd.dense_fallback);
    for (std::size_t k = 1; k <= 5; ++k) {
        const double s = std::sin(static_cast<double>(k) * pi * g.dx() / 2.0);
        const double exact = 1.0 - 4.0 * eps / (g.dx() * g.dx()) * s * s;
        EXPECT_NEAR(sd.lambdas[k - 1], exact, 1e-9) << k;
        Field sine = Field::sample(g, [&](double x) { return std::sin(static_cast<double>(k) * pi * x); });
        sine *= 1.0 / norm_l2(sine);
        EXPECT_NEAR(std::abs(inner_product(sd.phis[k - 1], sine)), 1.0, 1e-10);
    }
    // Continuum values for the leading modes.
    EXPECT_NEAR(sd.lambdas[0], 1.0 - eps * pi * pi, 1e-4);
    EXPECT_NEAR(sd.lambdas[2], 1.0 - 9.0 * eps * pi * pi, 1e-3);
}

TEST(Eigensolve, AgreesWithDenseEigen) {
    const Grid g(2.0, 300);
    const auto s = approx_state(0.05, 0.8, g);
    const auto op = assemble(0.05, s, burgers_flux());
    const auto sd = eigensolve(op, 6);
    const std::size_t n = op.matrix.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) a(r, r) = op.matrix.diag[r];
    for (std::size_t r = 0; r + 1 < n; ++r) {
        a(r + 1, r) = op.matrix.lower[r];
        a(r, r + 1) = op.matrix.upper[r];
    }
    Eigen::VectorXcd ev = a.eigenvalues();
    std::vector<double> re;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        EXPECT_LT(std::abs(ev[i].imag()), 1e-8);
        re.push_back(ev[i].real());
    }
    std::sort(re.begin(), re.end(), std::greater<>());
    for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(sd.lambdas[k], re[k], 1e-8 * (1.0 + std::abs(re[k]))) << k;
}

TEST(Eigensolve, BiorthonormalPairsAndAdjointIdentity) {
    const Grid g(2.0, 500);
    const auto s = approx_state(0.05, 0.7, g);
    const auto op = assemble(0.05, s, burgers_flux());
    const auto sd = spectral_data(s, burgers_flux(), 6);
    EXPECT_NEAR(inner_product(sd.psis[0], s.d_xi), 1.0, 1e-12);
    for (std::size_t j = 0; j < 6; ++j)
        for (std::size_t k = 0; k < 6; ++k)
            EXPECT_NEAR(inner_product(sd.psis[j], sd.phis[k]), j == k ? 1.0 : 0.0, 1e-8) << j << ' ' << k;
    for (std::size_t k = 0; k < 6; ++k) {
        const Field lphi = apply(op, sd.phis[k]);
        EXPECT_LT(norm_sup(lphi - sd.lambdas[k] * sd.phis[k]), 1e-8 * (1.0 + std::abs(sd.lambdas[k])) * norm_sup(sd.phis[k]));
        const Field w = random_interior(g, 11 + static_cast<unsigned>(k));
        EXPECT_NEAR(inner_product(sd.psis[k], apply(op, w)), sd.lambdas[k] * inner_product(sd.psis[k], w),
                    1e-7 * (1.0 + std::abs(sd.lambdas[k])) * norm_l2(sd.psis[k]) * norm_l2(w));
    }
}

TEST(Eigensolve, DenseFallbackForNegativeCouplings) {
    const Grid g(1.0, 60);
    Tridiagonal a(g.interior());
    for (std::size_t r = 0; r < a.size(); ++r) a.diag[r] = 0.01 * static_cast<double>(r);
    for (std::size_t r = 0; r + 1 < a.size(); ++r) a.lower[r] = a.upper[r] = -1.0;
    const LinearizedOperator op{g, 0.1, a};
    EXPECT_FALSE(sign_condition(op));
    EXPECT_THROW(self_adjoint_conjugate(op), Error);
    const auto sd = eigensolve(op, 3);
    EXPECT_TRUE(sd.dense_fallback);
    // Flipping the sign of every other entry maps the couplings to +1 without changing the spectrum.
    Tridiagonal b = a;
    for (std::size_t r = 0; r + 1 < b.size(); ++r) b.lower[r] = b.upper[r] = 1.0;
    const auto ref = eigensolve(LinearizedOperator{g, 0.1, b}, 3);
    EXPECT_FALSE(ref.dense_fallback);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(sd.lambdas[k], ref.lambdas[k], 1e-10);
}

TEST(Eigensolve, PrincipalEigenvaluePositiveAtTheCentre) {
    const Grid g(2.0, 799);
    const auto sd = spectral_data(approx_state(0.05, 1.0, g), burgers_flux(), 3);
    EXPECT_GT(sd.lambdas[0], 0.0);
    EXPECT_LT(sd.lambdas[0], 1.0);
    EXPECT_LT(sd.lambdas[1], 0.0);
}

TEST(Eigensolve, SymmetrizedSpectrumIsEpsTimesTheOriginal) {
    const Grid g(2.0, 400);
    const auto op = assemble(0.05, approx_state(0.05, 0.7, g), burgers_flux());
    const auto sd = eigensolve(op, 4);
    const Tridiagonal m = self_adjoint_conjugate(op);
    std::vector<double> w, z;
    std::vector<double> e(m.upper.begin(), m.upper.end());
    slowmotion::detail::sym_tridiagonal_top(m.diag, e, 4, w, z);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(w[k], 0.05 * sd.lambdas[k], 1e-10 * (1.0 + std::abs(w[k])));
}

TEST(Lambda1Asymptotic, ValueSymmetryAndExponent) {
    EXPECT_NEAR(lambda1_asymptotic(0.05, 0.5, 1.0, 0.0), 10.0 * std::exp(-2.5), 1e-14);
    EXPECT_NEAR(lambda1_asymptotic(0.05, 0.5, 1.0, 0.0), 0.8208, 1e-4);
    EXPECT_NEAR(lambda1_asymptotic(0.04, 0.3, 1.0, 0.7), lambda1_asymptotic(0.04, 0.7, 1.0, 0.7), 1e-14);
    // At the centre ln(eps lambda_1) is linear in 1/eps with slope -ell^2/8.
    const double ell = 2.0;
    auto y = [&](double eps) { return std::log(eps * lambda1_asymptotic(eps, 0.5 * ell, ell, 0.0)); };
    for (auto [a, b] : {std::pair{0.04, 0.05}, std::pair{0.05, 0.0625}}) {
        const double slope = (y(a) - y(b)) / (1.0 / a - 1.0 / b);
        EXPECT_NEAR(slope, -ell * ell / 8.0, 1e-12);
    }
}

TEST(ValidateH2, GapAndShrinkingLambda1) {
    // ell = 2 keeps eps = 0.08 inside the existence range of the centred metastable state.
    const Grid g(2.0, 799);
    const auto rep = validate_H2({0.08, 0.03}, {1.0}, burgers_flux(), g, 4);
    ASSERT_EQ(rep.cells.size(), 2u);
    ASSERT_EQ(rep.Lambda1.size(), 2u);
    EXPECT_GT(rep.Lambda1[1], 0.0);
    EXPECT_LT(rep.Lambda1[1], rep.Lambda1[0]);
    EXPECT_GT(rep.min_gap, 0.0);
    EXPECT_GT(rep.fitted_C, 0.0);
    EXPECT_TRUE(std::isfinite(rep.max_normalization_sum));
    for (const auto& c : rep.cells) EXPECT_NEAR(c.gap, c.lambdas[0] - c.lambdas[1], 1e-15);
}

TEST(LambdaTable, InterpolatesBetweenLatticePoints) {
    const Grid g(2.0, 499);
    const SpectralProvider p(0.05, burgers_flux(), g, 2);
    const LambdaTable t(p, 0.6, 1.4, 3);
    EXPECT_EQ(t.size(), 3u);
    const double a = p.spectral(0.6).lambdas[1], b = p.spectral(1.0).lambdas[1];
    EXPECT_NEAR(t.lambda(2, 0.6), a, 1e-12);
    EXPECT_NEAR(t.lambda(2, 0.8), 0.5 * (a + b), 1e-12);
}
