#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "slowmotion/core.hpp"
#include "slowmotion/error.hpp"
#include "slowmotion/tridiag.hpp"

namespace slowmotion {

enum class BranchKind { positive, negative, metastable, ns };

inline std::string to_string(BranchKind k) {
    switch (k) {
    case BranchKind::positive: return "positive";
    case BranchKind::negative: return "negative";
    case BranchKind::metastable: return "metastable";
    case BranchKind::ns: return "ns";
    }
    return "unknown";
}

struct ShootingOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    /// Landing tolerance on the return-to-zero point, relative to the arc length.
    double landing_tol = 1e-13;
    int max_bisections = 400;
    double beta_min = 1e-9;
    double beta_max = 1e12;
};

/// Sign of the one-signed arc solved on (0, length).
enum class ArcSign { positive, negative };

/// Solution of eps u'' - (f(u))' + f'(u) = 0 on (0, length) with zero ends and one sign.
///
/// Coordinates are local to the arc. w is the flux variable of eps u' = f(u) + w.
struct ArcSolution {
    ArcSign sign = ArcSign::positive;
    double eps = 0.0;
    double length = 0.0;
    /// Magnitude of the slope at the shooting end (right end for positive, left for negative).
    double beta = 0.0;
    double slope_left = 0.0;
    double slope_right = 0.0;
    /// Distance between the computed return-to-zero point and the target end.
    double landing_error = 0.0;
    int bisections = 0;
    std::vector<double> s;
    std::vector<double> u;
    std::vector<double> w;
};

namespace detail {

using State2 = std::array<double, 2>;

/// Integrates from the shooting end in the running variable tau >= 0.
///
/// Positive arcs start at the right end and march leftwards (tau = length - s); negative arcs
/// start at the left end and march rightwards (tau = s). Both directions damp the fast mode.
class ArcShooter {
public:
    ArcShooter(ArcSign sign, double eps, const FluxFunction& flux, double length, const ShootingOptions& opt)
        : sign_(sign), eps_(eps), flux_(flux), length_(length), opt_(opt) {}

    struct Shot {
        double travel;  // tau at the first return to zero, or +inf if none within the horizon
        double w_end;
    };

    /// Shoots with end slope magnitude beta; samples (u, w) at ascending tau values if requested.
    Shot shoot(double beta, const std::vector<double>* taus = nullptr, std::vector<double>* us = nullptr,
               std::vector<double>* ws = nullptr) const {
        namespace odeint = boost::numeric::odeint;
        const double o = sign_ == ArcSign::positive ? -1.0 : 1.0;
        const double sg = sign_ == ArcSign::positive ? 1.0 : -1.0;
        const double eps = eps_;
        const FluxFunction& flux = flux_;
        auto rhs = [&](const State2& y, State2& dy, double) {
            dy[0] = o * (flux.f(y[0]) + y[1]) / eps;
            dy[1] = -o * flux.df(y[0]);
        };
        auto stepper = odeint::make_dense_output(opt_.atol, opt_.rtol, odeint::runge_kutta_dopri5<State2>());
        State2 y0{0.0, -eps * beta};
        const double horizon = 1.5 * length_ + 10.0 * std::sqrt(eps);
        double dt0 = std::min(1e-3 * length_, 0.01 * eps / std::max(1.0, beta));
        stepper.initialize(y0, 0.0, dt0);
        std::size_t next = 0;
        const std::size_t npts = taus ? taus->size() : 0;
        State2 tmp{};
        double t_prev = 0.0;
        double u_prev = 0.0;
        int steps = 0;
        while (true) {
            auto [t0, t1] = stepper.do_step(rhs);
            ++steps;
            const State2& cur = stepper.current_state();
            if (!std::isfinite(cur[0]) || !std::isfinite(cur[1]) || steps > 5000000) {
                return {std::numeric_limits<double>::infinity(), 0.0};
            }
            const bool returned = t0 > 0.0 && sg * cur[0] <= 0.0 && sg * u_prev > 0.0;
            double t_hit = t1;
            if (returned) {
                double lo = t_prev, hi = t1;
                for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    stepper.calc_state(mid, tmp);
                    if (sg * tmp[0] > 0.0) lo = mid;
                    else hi = mid;
                }
                t_hit = 0.5 * (lo + hi);
            }
            const double t_cap = returned ? t_hit : t1;
            while (next < npts && (*taus)[next] <= t_cap) {
                stepper.calc_state((*taus)[next], tmp);
                (*us)[next] = tmp[0];
                (*ws)[next] = tmp[1];
                ++next;
            }
            if (returned) {
                stepper.calc_state(t_hit, tmp);
                for (; next < npts; ++next) {
                    (*us)[next] = 0.0;
                    (*ws)[next] = tmp[1];
                }
                return {t_hit, tmp[1]};
            }
            if (t1 > horizon) return {std::numeric_limits<double>::infinity(), 0.0};
            t_prev = t1;
            u_prev = cur[0];
            (void)t0;
        }
    }

private:
    ArcSign sign_;
    double eps_;
    const FluxFunction& flux_;
    double length_;
    ShootingOptions opt_;
};

}  // namespace detail

/// Solves a one-signed arc by bisection on the end slope, sampling at local coordinates s.
inline ArcSolution solve_arc(ArcSign sign, double eps, const FluxFunction& flux, double length,
                             const std::vector<double>& s_points, const ShootingOptions& opt = {}) {
    if (!(eps > 0.0)) fail(ErrorKind::DomainViolation, "eps must be positive");
    if (!(length > 0.0)) fail(ErrorKind::DomainViolation, "arc length must be positive");
    detail::ArcShooter shooter(sign, eps, flux, length, opt);

    // Burgers travel grows with beta. Fluxes with f''(0) = 0 travel far at small beta too, so scan up to the
    // first undershoot and bracket on the increasing side, which carries the u ~ x outer solution.
    double lo = opt.beta_min;
    while (!(shooter.shoot(lo).travel < length)) {
        lo *= 2.0;
        if (lo > opt.beta_max)
            fail(ErrorKind::NoBracket, "no one-signed solution: interval shorter than the small-amplitude half period");
    }
    double hi = lo;
    while (true) {
        hi *= 2.0;
        if (hi > opt.beta_max) fail(ErrorKind::NoBracket, "end slope bracket exceeded beta_max");
        if (shooter.shoot(hi).travel >= length) break;
        lo = hi;
    }
    int it = 0;
    double t_lo = shooter.shoot(lo).travel;
    double t_hi = shooter.shoot(hi).travel;
    double best = std::abs(t_lo - length) <= std::abs(t_hi - length) ? lo : hi;
    for (; it < opt.max_bisections; ++it) {
        const double mid = hi / lo > 4.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double travel = shooter.shoot(mid).travel;
        if (std::abs(travel - length) <= opt.landing_tol * length) {
            best = mid;
            break;
        }
        if (travel < length) {
            lo = mid;
            t_lo = travel;
        } else {
            hi = mid;
            t_hi = travel;
        }
        best = std::abs(t_lo - length) <= std::abs(t_hi - length) ? lo : hi;
        if (hi - lo <= 4e-16 * hi) break;
    }
    if (it >= opt.max_bisections) fail(ErrorKind::NonConvergence, "end slope bisection did not converge");

    const bool pos = sign == ArcSign::positive;
    std::vector<double> taus(s_points.size());
    for (std::size_t j = 0; j < s_points.size(); ++j) {
        // Sampled in ascending running variable.
        const std::size_t src = pos ? s_points.size() - 1 - j : j;
        taus[j] = pos ? length - s_points[src] : s_points[src];
    }
    std::vector<double> us(taus.size()), ws(taus.size());
    const auto shot = shooter.shoot(best, &taus, &us, &ws);
    if (!std::isfinite(shot.travel)) fail(ErrorKind::NonConvergence, "final shot did not return to zero");

    ArcSolution out;
    out.sign = sign;
    out.eps = eps;
    out.length = length;
    out.beta = best;
    out.bisections = it;
    out.landing_error = std::abs(shot.travel - length);
    out.s = s_points;
    out.u.resize(s_points.size());
    out.w.resize(s_points.size());
    for (std::size_t j = 0; j < s_points.size(); ++j) {
        const std::size_t dst = pos ? s_points.size() - 1 - j : j;
        out.u[dst] = us[j];
        out.w[dst] = ws[j];
    }
    for (std::size_t j = 0; j < s_points.size(); ++j) {
        if (s_points[j] <= 0.0 || s_points[j] >= length) out.u[j] = 0.0;
    }
    // At the far end u = 0, so eps u' = w there.
    const double far_slope = shot.w_end / eps;
    if (pos) {
        out.slope_right = -best;
        out.slope_left = far_slope;
    } else {
        out.slope_left = -best;
        out.slope_right = far_slope;
    }
    return out;
}

/// Positive stationary solution on (a, b), zero elsewhere on the grid.
inline Field shoot_positive(double eps, const FluxFunction& flux, double a, double b, const Grid& grid,
                            const ShootingOptions& opt = {}) {
    if (!(0.0 <= a && a < b && b <= grid.ell())) fail(ErrorKind::DomainViolation, "shoot_positive: need 0 <= a < b <= ell");
    std::vector<std::size_t> idx;
    std::vector<double> s;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        if (x > a && x < b) {
            idx.push_back(i);
            s.push_back(x - a);
        }
    }
    const ArcSolution arc = solve_arc(ArcSign::positive, eps, flux, b - a, s, opt);
    Field out(grid);
    for (std::size_t j = 0; j < idx.size(); ++j) out[idx[j]] = arc.u[j];
    return out;
}

/// Relative spread of the Burgers Bernoulli quantity (u^2/2 - eps - v) exp(-v/eps), v = -w.
inline double bernoulli_variation(const ArcSolution& arc) {
    double kmin = std::numeric_limits<double>::infinity();
    double kmax = -kmin;
    double k0 = 0.0;
    const double v0 = -arc.w.front();
    for (std::size_t j = 0; j < arc.u.size(); ++j) {
        const double v = -arc.w[j];
        const double k = (0.5 * arc.u[j] * arc.u[j] - arc.eps - v) * std::exp(-(v - v0) / arc.eps);
        if (j == 0) k0 = k;
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
    }
    return (kmax - kmin) / std::abs(k0);
}

struct MonotoneOptions {
    int max_iterations = 500000;
    double tolerance = 1e-13;
    /// Slack allowed in the ordering and sub/super sign checks.
    double order_tol = 1e-11;
};

struct MonotoneResult {
    Field solution;
    int iterations = 0;
    double stabilization = 0.0;
    /// Smallest nodewise increment u_{k+1} - u_k seen over the run.
    double min_increment = 0.0;
};

/// Sine subsolution alpha sin(pi x / ell) with alpha halved until the discrete operator is nonnegative.
inline Field sine_subsolution(double eps, const FluxFunction& flux, const Grid& grid) {
    const double pi = std::acos(-1.0);
    const double ell = grid.ell();
    double alpha = ell / pi;
    for (int k = 0; k < 80; ++k, alpha *= 0.5) {
        Field sub = Field::sample(grid, [&](double x) { return alpha * std::sin(pi * x / ell); });
        sub.clamp_dirichlet();
        const Field r = stationary_residual(sub, eps, flux);
        bool ok = true;
        for (std::size_t i = 1; i + 1 < sub.size() && ok; ++i) ok = r[i] >= 0.0 && sub[i] <= grid.x(i);
        if (ok) return sub;
    }
    fail(ErrorKind::NoBracket, "no positive sine subsolution: eps too large for this interval");
}

/// Monotone sweep between an ordered sub/supersolution pair.
inline MonotoneResult monotone_iterate(double eps, const FluxFunction& flux, const Field& sub, const Field& super,
                                       const Grid& grid, const MonotoneOptions& opt = {}) {
    if (!(sub.grid() == grid) || !(super.grid() == grid)) fail(ErrorKind::GridMismatch, "monotone_iterate: grid mismatch");
    const std::size_t m = grid.size() - 1;
    const double dx = grid.dx();
    const double scale = std::max(1.0, norm_sup(super));
    for (std::size_t i = 0; i <= m; ++i)
        if (sub[i] > super[i] + opt.order_tol * scale) fail(ErrorKind::OrderViolation, "sub exceeds super");
    if (sub[0] > 0.0 || sub[m] > 0.0 || super[0] < 0.0 || super[m] < 0.0)
        fail(ErrorKind::DomainViolation, "boundary values do not bracket zero");
    const Field rs = stationary_residual(sub, eps, flux);
    const Field rS = stationary_residual(super, eps, flux);
    for (std::size_t i = 1; i < m; ++i) {
        if (rs[i] < -1e-9 * scale) fail(ErrorKind::DomainViolation, "sub is not a discrete subsolution");
        if (rS[i] > 1e-9 * scale) fail(ErrorKind::DomainViolation, "super is not a discrete supersolution");
    }

    double sup_term = 0.0;
    for (const Field* f : {&sub, &super}) {
        for (std::size_t i = 1; i < m; ++i) {
            const double du = ((*f)[i + 1] - (*f)[i - 1]) / (2.0 * dx);
            const double c = flux.d2f((*f)[i]);
            sup_term = std::max(sup_term, std::abs(c * du - c));
        }
    }
    const double M = 2.0 * sup_term + 1.0;

    const std::size_t n = grid.interior();
    Tridiagonal A(n);
    const double c2 = eps / (dx * dx);
    for (std::size_t r = 0; r < n; ++r) A.diag[r] = -2.0 * c2 - M;
    for (std::size_t r = 0; r + 1 < n; ++r) A.lower[r] = A.upper[r] = c2;

    Field u = sub;
    u.clamp_dirichlet();
    std::vector<double> rhs(n), scratch;
    double min_inc = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= opt.max_iterations; ++k) {
        for (std::size_t i = 1; i < m; ++i)
            rhs[i - 1] = (flux.f(u[i + 1]) - flux.f(u[i - 1])) / (2.0 * dx) - flux.df(u[i]) - M * u[i];
        thomas_solve(A, rhs, scratch);
        double change = 0.0;
        for (std::size_t i = 1; i < m; ++i) {
            const double inc = rhs[i - 1] - u[i];
            min_inc = std::min(min_inc, inc);
            change = std::max(change, std::abs(inc));
            if (inc < -opt.order_tol * scale || rhs[i - 1] > super[i] + opt.order_tol * scale)
                fail(ErrorKind::OrderViolation, "monotone ordering broke at iteration " + std::to_string(k));
            u[i] = rhs[i - 1];
        }
        if (!std::isfinite(change)) fail(ErrorKind::NaNDetected, "monotone iteration produced NaN");
        if (change <= opt.tolerance * scale) return {u, k, M, min_inc};
    }
    fail(ErrorKind::NonConvergence, "monotone iteration hit the iteration cap");
}

struct SteadyBranch {
    BranchKind kind;
    double eps;
    Field field;
    double residual_l1;
    std::vector<double> zero_crossings;
    /// Slope difference of the two glued arcs at ell/2; zero for single-arc branches.
    double slope_mismatch = 0.0;
};

namespace detail {

inline SteadyBranch finish_branch(BranchKind kind, double eps, const FluxFunction& flux, Field f, double mismatch) {
    const double r = norm_l1(stationary_residual(f, eps, flux));
    auto zc = zero_crossings(f);
    return {kind, eps, std::move(f), r, std::move(zc), mismatch};
}

/// Glues an arc on (0, ell/2) with an arc on (ell/2, ell).
inline SteadyBranch glued(BranchKind kind, ArcSign left, ArcSign right, double eps, const FluxFunction& flux,
                          const Grid& grid, const ShootingOptions& opt) {
    const double half = 0.5 * grid.ell();
    std::vector<std::size_t> li, ri;
    std::vector<double> ls, rs;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double x = grid.x(i);
        if (x < half) {
            li.push_back(i);
            ls.push_back(x);
        } else if (x > half) {
            ri.push_back(i);
            rs.push_back(x - half);
        }
    }
    const ArcSolution la = solve_arc(left, eps, flux, half, ls, opt);
    const ArcSolution ra = solve_arc(right, eps, flux, half, rs, opt);
    Field f(grid);
    for (std::size_t j = 0; j < li.size(); ++j) f[li[j]] = la.u[j];
    for (std::size_t j = 0; j < ri.size(); ++j) f[ri[j]] = ra.u[j];
    return finish_branch(kind, eps, flux, std::move(f), ra.slope_left - la.slope_right);
}

}  // namespace detail

inline SteadyBranch build_branch(BranchKind kind, double eps, const FluxFunction& flux, const Grid& grid,
                                 const ShootingOptions& opt = {}) {
    switch (kind) {
    case BranchKind::positive:
        return detail::finish_branch(kind, eps, flux, shoot_positive(eps, flux, 0.0, grid.ell(), grid, opt), 0.0);
    case BranchKind::negative: {
        Field pos = shoot_positive(eps, flux, 0.0, grid.ell(), grid, opt);
        return detail::finish_branch(kind, eps, flux, reflect(pos, -1.0), 0.0);
    }
    case BranchKind::metastable: {
        SteadyBranch b = detail::glued(kind, ArcSign::negative, ArcSign::positive, eps, flux, grid, opt);
        if (std::abs(b.slope_mismatch) > 10.0 * grid.dx())
            fail(ErrorKind::C1MatchFailure, "slope jump at ell/2 is " + std::to_string(b.slope_mismatch));
        return b;
    }
    case BranchKind::ns:
        return detail::glued(kind, ArcSign::positive, ArcSign::negative, eps, flux, grid, opt);
    }
    fail(ErrorKind::DomainViolation, "unknown branch kind");
}

struct MonotonicityPair {
    double eps_hi;
    double eps_lo;
    /// max over interior nodes of U_{eps_hi} - U_{eps_lo}; nonpositive when the ordering holds.
    double max_violation;
};

struct MonotonicityReport {
    std::vector<MonotonicityPair> pairs;
    double max_violation = 0.0;
    int violations_above_1e8 = 0;
};

inline MonotonicityReport epsilon_monotonicity_check(const FluxFunction& flux, const Grid& grid,
                                                     const std::vector<double>& eps_list) {
    for (std::size_t k = 1; k < eps_list.size(); ++k)
        if (!(eps_list[k] < eps_list[k - 1])) fail(ErrorKind::DomainViolation, "eps_list must be strictly decreasing");
    MonotonicityReport rep;
    if (eps_list.size() < 2) return rep;
    std::vector<Field> fields;
    for (double e : eps_list) fields.push_back(shoot_positive(e, flux, 0.0, grid.ell(), grid));
    rep.max_violation = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < fields.size(); ++k) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            const double d = fields[k - 1][i] - fields[k][i];
            worst = std::max(worst, d);
            if (d > 1e-8) ++rep.violations_above_1e8;
        }
        rep.pairs.push_back({eps_list[k - 1], eps_list[k], worst});
        rep.max_violation = std::max(rep.max_violation, worst);
    }
    return rep;
}

}  // namespace slowmotion
