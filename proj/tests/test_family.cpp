#include <gtest/gtest.h>

#include <cmath>

#include "slowmotion/family.hpp"
#include "slowmotion/spectral.hpp"

using namespace slowmotion;

TEST(Hyperbolic, CaseClassification) {
    const Grid g(1.0, 100);
    EXPECT_EQ(hyperbolic_steady(0.2, 0.6, g).kind, HyperbolicCase::interior);
    EXPECT_EQ(hyperbolic_steady(0.0, 0.6, g).kind, HyperbolicCase::side_gamma1);
    EXPECT_EQ(hyperbolic_steady(0.2, 1.0, g).kind, HyperbolicCase::side_gamma2);
    EXPECT_EQ(hyperbolic_steady(0.3, 0.3, g).kind, HyperbolicCase::diagonal);
    EXPECT_EQ(hyperbolic_steady(0.0, 1.0, g).kind, HyperbolicCase::vertex_ns);
    EXPECT_EQ(hyperbolic_steady(0.0, 0.0, g).kind, HyperbolicCase::vertex_plus);
    EXPECT_EQ(hyperbolic_steady(1.0, 1.0, g).kind, HyperbolicCase::vertex_minus);
    EXPECT_THROW(hyperbolic_steady(0.6, 0.2, g), Error);
}

TEST(Hyperbolic, PiecewiseLinearWithEntropyJump) {
    const Grid g(1.0, 99);
    const auto h = hyperbolic_steady(0.2, 0.6, g);
    // Jump at 0.4 from +0.2 down to -0.2, slope one on either side.
    EXPECT_NEAR(h.field[30], 0.1, 1e-14);
    EXPECT_NEAR(h.field[50], -0.1, 1e-14);
    EXPECT_NEAR(h.field[40], 0.0, 1e-14);
    const auto ns = hyperbolic_steady(0.0, 1.0, g);
    EXPECT_NEAR(ns.field[25], 0.25, 1e-14);
    EXPECT_NEAR(ns.field[75], -0.25, 1e-14);
    const auto plus = hyperbolic_steady(0.0, 0.0, g);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(plus.field[i], g.x(i));
}

TEST(TanhFamily, ZeroAtXiAndDirichletData) {
    const Grid g(1.0, 1000);
    for (double xi : {0.2, 0.4, 0.5, 0.7}) {
        EXPECT_NEAR(tanh_family(xi, xi, 0.05, 1.0), 0.0, 1e-15);
        const auto s = approx_state(0.05, xi, g);
        EXPECT_TRUE(s.field.satisfies_dirichlet());
        const auto z = zero_crossings(s.field);
        ASSERT_EQ(z.size(), 1u);
        EXPECT_NEAR(z[0], xi, 1e-12);
    }
}

TEST(TanhFamily, OddAboutTheCentre) {
    const Grid g(2.0, 800);
    const auto s = approx_state(0.05, 1.0, g);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(s.field[i], -s.field[g.size() - 1 - i], 1e-12);
}

TEST(TanhFamily, ApproachesTheInviscidStateAsEpsShrinks) {
    const Grid g(1.0, 1000);
    const double xi = 0.4;
    const auto limit = hyperbolic_steady(xi, xi, g);
    double prev = 1e9;
    for (double eps : {0.1, 0.05, 0.02, 0.01}) {
        const auto s = approx_state(eps, xi, g);
        double err = 0.0;
        for (std::size_t i = 100; i <= 900; ++i) err = std::max(err, std::abs(s.field[i] - limit.field[i]));
        EXPECT_LE(err, prev) << eps;
        prev = err;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(TanhFamily, XiDerivativeMatchesMinusOneInTheOuterRegion) {
    const Grid g(1.0, 1000);
    const auto s = approx_state(0.02, 0.4, g);
    // Outer solution x - xi has derivative -1 in xi.
    EXPECT_NEAR(s.d_xi[400], -1.0, 1e-6);
    EXPECT_NEAR(s.d_xi[600], -1.0, 1e-6);
    EXPECT_EQ(s.d_xi[0], 0.0);
}

TEST(MatchingPoints, LayerEdgesAndSymmetry) {
    for (double eps : {0.1, 0.05, 0.02}) {
        const auto m = matching_points(eps, 0.4, 1.0);
        EXPECT_GT(m.u1s, 0.0);
        EXPECT_LT(m.u1s, 10.0 * eps);
        EXPECT_GT(m.u2s, 0.4);
        EXPECT_LT(m.u2s, 1.0);
        EXPECT_NEAR(m.u1_asym, eps * 0.4, 1e-15);
        // The matching point is where the tanh profile meets the outer line.
        EXPECT_NEAR(tanh_family(m.u1s, 0.4, eps, 1.0), m.u1s - 0.4, 1e-12);
    }
    double prev = 0.0;
    for (double eps : {0.1, 0.05, 0.02}) {
        const double gap = 1.0 - matching_points(eps, 0.4, 1.0).u2s;
        if (prev > 0.0) {
            EXPECT_LT(gap, prev);
        }
        prev = gap;
    }
    const auto c = matching_points(0.05, 1.0, 2.0);
    EXPECT_NEAR(c.u1s, 2.0 - c.u2s, 1e-12);
    EXPECT_THROW(matching_points(0.05, 0.0, 1.0), Error);
}

TEST(ThetaAsymptotic, ClosedForm) {
    EXPECT_NEAR(theta_asymptotic(0.1, 0.4, 1.0), -0.04, 1e-15);
    for (double xi : {0.1, 0.5, 0.9}) EXPECT_NEAR(theta_asymptotic(0.05, xi, 2.0), -0.05 * xi * 2.0, 1e-15);
}

TEST(ResidualReport, RejectsUnresolvedLayers) {
    const Grid g(1.0, 40);
    const auto s = approx_state(0.1, 0.4, g);
    try {
        residual_report(s, burgers_flux());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnresolvedLayer);
    }
}

TEST(ResidualReport, AsymptoticAndSpectralSpeeds) {
    const Grid g(2.0, 800);
    const auto s = approx_state(0.05, 0.8, g);
    const auto a = residual_report(s, burgers_flux());
    EXPECT_FALSE(a.theta_from_spectrum);
    EXPECT_EQ(a.theta, theta_asymptotic(0.05, 0.8, 2.0));
    EXPECT_NEAR(a.omega_small, a.omega_big / 0.8, 1e-15);
    EXPECT_GT(a.omega_big, 0.0);
    const auto sd = spectral_data(s, burgers_flux(), 2);
    const auto b = residual_report(s, burgers_flux(), sd);
    EXPECT_TRUE(b.theta_from_spectrum);
    EXPECT_TRUE(std::isfinite(b.theta));
    // Leftward drift toward the nearer wall.
    EXPECT_LT(b.theta, 0.0);
}

TEST(ExactMatched, ContinuousWithShrinkingSlopeJumpTowardTheCentre) {
    const double ell = 4.0;
    const Grid g(ell, 799);
    const auto near_wall = exact_matched_state(0.1, 0.3 * ell, g);
    const auto inner = exact_matched_state(0.1, 0.4 * ell, g);
    EXPECT_TRUE(near_wall.field.satisfies_dirichlet());
    // Both arcs vanish at xi, so the field is continuous across it.
    const std::size_t k = 240;
    EXPECT_NEAR(g.x(k), 0.3 * ell, 1e-12);
    EXPECT_EQ(near_wall.field[k], 0.0);
    EXPECT_LT(std::abs(near_wall.field[k - 1]), 2.0 * g.dx());
    EXPECT_LT(std::abs(near_wall.field[k + 1]), 2.0 * g.dx());
    EXPECT_GT(std::abs(near_wall.slope_jump), std::abs(inner.slope_jump));
    EXPECT_GT(std::abs(near_wall.slope_jump), 0.0);
    EXPECT_EQ(near_wall.construction, Construction::exact_matched);
}

TEST(ExactMatched, CentreCoincidesWithTheMetastableBranch) {
    const double ell = 4.0;
    const Grid g(ell, 800);
    const auto s = exact_matched_state(0.1, 0.5 * ell, g);
    const auto m = build_branch(BranchKind::metastable, 0.1, burgers_flux(), g);
    EXPECT_LT(norm_sup(s.field - m.field), 1e-8);
    EXPECT_LT(std::abs(s.slope_jump), 1e-8);
}
