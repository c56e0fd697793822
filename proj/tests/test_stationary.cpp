#include <gtest/gtest.h>

#include <cmath>

#include "slowmotion/stationary.hpp"

using namespace slowmotion;

namespace {
const double pi = std::acos(-1.0);

std::vector<double> interior_nodes(const Grid& g) {
    std::vector<double> s;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) s.push_back(g.x(i));
    return s;
}
}  // namespace

TEST(Shooting, PositiveBranchShape) {
    const Grid g(1.0, 1000);
    const Field u = shoot_positive(0.1, burgers_flux(), 0.0, 1.0, g);
    EXPECT_TRUE(u.satisfies_dirichlet());
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        EXPECT_GT(u[i], 0.0);
        EXPECT_LE(u[i], g.x(i));
    }
    EXPECT_LE(u[1] / g.dx(), 1.0);
}

TEST(Shooting, BernoulliInvariantAlongTheArc) {
    const Grid g(1.0, 1000);
    for (double eps : {0.1, 0.05}) {
        const ArcSolution arc = solve_arc(ArcSign::positive, eps, burgers_flux(), 1.0, interior_nodes(g));
        EXPECT_LT(bernoulli_variation(arc), 1e-6) << eps;
        EXPECT_LT(arc.landing_error, 1e-10);
    }
}

TEST(Shooting, NegativeArcIsTheMirrorOfThePositiveArc) {
    const Grid g(1.5, 300);
    const auto s = interior_nodes(g);
    const ArcSolution p = solve_arc(ArcSign::positive, 0.05, burgers_flux(), 1.5, s);
    const ArcSolution n = solve_arc(ArcSign::negative, 0.05, burgers_flux(), 1.5, s);
    for (std::size_t j = 0; j < s.size(); ++j) EXPECT_NEAR(n.u[j], -p.u[s.size() - 1 - j], 1e-9);
}

TEST(Shooting, NoPositiveSolutionBeyondTheExistenceLimit) {
    const Grid g(1.0, 200);
    try {
        shoot_positive(1.05 / (pi * pi), burgers_flux(), 0.0, 1.0, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoBracket);
    }
    EXPECT_NO_THROW(shoot_positive(0.95 / (pi * pi), burgers_flux(), 0.0, 1.0, g));
}

TEST(Shooting, PowerFluxSteadyState) {
    const Grid g(2.0, 800);
    const FluxFunction f = power_flux(3.0);
    const SteadyBranch b = build_branch(BranchKind::positive, 0.05, f, g);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        EXPECT_GT(b.field[i], 0.0);
        EXPECT_LE(b.field[i], g.x(i) + 1e-9);
    }
    // Outer solution u = x away from the right layer.
    EXPECT_NEAR(b.field[400], g.x(400), 0.05);
}

TEST(Monotone, AgreesWithShootingToSecondOrder) {
    const Grid g(1.0, 1000);
    const double eps = 0.1;
    const FluxFunction f = burgers_flux();
    const Field sub = sine_subsolution(eps, f, g);
    const Field super = Field::sample(g, [](double x) { return x; });
    const MonotoneResult m = monotone_iterate(eps, f, sub, super, g);
    const Field shot = shoot_positive(eps, f, 0.0, 1.0, g);
    EXPECT_LE(norm_sup(m.solution - shot), 5.0 * g.dx() * g.dx());
    EXPECT_GE(m.min_increment, -1e-11);
    EXPECT_LT(norm_l1(stationary_residual(m.solution, eps, f)), 1e-9);
}

TEST(Monotone, FixedPointReturnsImmediately) {
    const Grid g(1.0, 300);
    const double eps = 0.1;
    const FluxFunction f = burgers_flux();
    const Field sub = sine_subsolution(eps, f, g);
    const Field super = Field::sample(g, [](double x) { return x; });
    const Field exact = monotone_iterate(eps, f, sub, super, g).solution;
    const MonotoneResult again = monotone_iterate(eps, f, exact, exact, g);
    EXPECT_EQ(again.iterations, 1);
    EXPECT_LT(norm_sup(again.solution - exact), 1e-12);
}

TEST(Monotone, RejectsUnorderedPair) {
    const Grid g(1.0, 100);
    const Field super = Field::sample(g, [](double x) { return x; });
    Field sub = super;
    sub *= 2.0;
    sub.clamp_dirichlet();
    try {
        monotone_iterate(0.1, burgers_flux(), sub, super, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OrderViolation);
    }
}

TEST(Branches, NegativeIsTheNegatedMirror) {
    const Grid g(1.0, 400);
    const SteadyBranch p = build_branch(BranchKind::positive, 0.05, burgers_flux(), g);
    const SteadyBranch n = build_branch(BranchKind::negative, 0.05, burgers_flux(), g);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(n.field[i], -p.field[g.size() - 1 - i]);
}

TEST(Branches, MetastableShapeAndSymmetry) {
    const double ell = 4.0;
    const Grid g(ell, 800);
    const SteadyBranch m = build_branch(BranchKind::metastable, 0.1, burgers_flux(), g);
    ASSERT_EQ(m.zero_crossings.size(), 1u);
    EXPECT_NEAR(m.zero_crossings[0], 0.5 * ell, g.dx());
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(m.field[i], -m.field[g.size() - 1 - i], 1e-8);
    const double dx2 = g.dx() * g.dx();
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        const double d2 = (m.field[i + 1] - 2.0 * m.field[i] + m.field[i - 1]) / dx2;
        if (g.x(i) < 0.5 * ell - g.dx()) {
            EXPECT_GT(d2, -1e-9) << i;
        }
        if (g.x(i) > 0.5 * ell + g.dx()) {
            EXPECT_LT(d2, 1e-9) << i;
        }
    }
    // The sampled arc carries the O(dx^2) truncation error of the layers at the walls.
    const SteadyBranch fine = build_branch(BranchKind::metastable, 0.1, burgers_flux(), Grid(ell, 1601));
    EXPECT_NEAR(m.residual_l1 / fine.residual_l1, 4.0, 0.3);
}

TEST(Branches, MetastableDoesNotExistOnAShortInterval) {
    const Grid g(1.0, 400);
    try {
        build_branch(BranchKind::metastable, 0.1, burgers_flux(), g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoBracket);
    }
}

TEST(Branches, NsConvergesToTheInviscidJump) {
    const double ell = 4.0;
    const Grid g(ell, 1599);
    const std::size_t iq = 400, i3q = 1200;
    double prev_q = 1e9, prev_3q = 1e9;
    for (double eps : {0.1, 0.05, 0.02}) {
        const SteadyBranch b = build_branch(BranchKind::ns, eps, burgers_flux(), g);
        const double dq = std::abs(b.field[iq] - g.x(iq));
        const double d3q = std::abs(b.field[i3q] - (g.x(i3q) - ell));
        EXPECT_LT(dq, prev_q);
        EXPECT_LT(d3q, prev_3q);
        prev_q = dq;
        prev_3q = d3q;
    }
}

TEST(Monotonicity, LadderHasNoViolations) {
    const Grid g(2.0, 800);
    const MonotonicityReport r = epsilon_monotonicity_check(burgers_flux(), g, {0.2, 0.1, 0.05});
    EXPECT_EQ(r.violations_above_1e8, 0);
    EXPECT_EQ(r.pairs.size(), 2u);
    EXPECT_TRUE(epsilon_monotonicity_check(burgers_flux(), g, {0.1}).pairs.empty());
}

TEST(Monotonicity, PositiveBranchApproachesIdentity) {
    const Grid g(1.0, 999);
    const std::size_t mid = 500;
    const Field a = shoot_positive(0.02, burgers_flux(), 0.0, 1.0, g);
    const Field b = shoot_positive(0.1, burgers_flux(), 0.0, 1.0, g);
    EXPECT_LT(std::abs(a[mid] - 0.5), std::abs(b[mid] - 0.5));
}
