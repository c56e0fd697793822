#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "slowmotion/core.hpp"
#include "slowmotion/error.hpp"
#include "slowmotion/stationary.hpp"

namespace slowmotion {

/// Classification of the parameter point (xi1, xi2) of the inviscid steady family.
enum class HyperbolicCase {
    interior,      ///< two boundary layers and one jump
    side_gamma1,   ///< xi1 = 0: one jump, one boundary layer
    side_gamma2,   ///< xi2 = ell: one jump, one boundary layer
    diagonal,      ///< xi1 = xi2: no jump, inviscid metastable state
    vertex_ns,     ///< (0, ell): single jump at ell/2
    vertex_plus,   ///< (0, 0): the positive state x
    vertex_minus,  ///< (ell, ell): the negative state x - ell
};

inline std::string to_string(HyperbolicCase c) {
    switch (c) {
    case HyperbolicCase::interior: return "interior";
    case HyperbolicCase::side_gamma1: return "side_gamma1";
    case HyperbolicCase::side_gamma2: return "side_gamma2";
    case HyperbolicCase::diagonal: return "diagonal";
    case HyperbolicCase::vertex_ns: return "vertex_ns";
    case HyperbolicCase::vertex_plus: return "vertex_plus";
    case HyperbolicCase::vertex_minus: return "vertex_minus";
    }
    return "unknown";
}

struct HyperbolicSteady {
    Field field;
    HyperbolicCase kind;
    double xi1;
    double xi2;
};

/// Piecewise linear entropy state: x - xi1 left of the jump at (xi1 + xi2)/2, x - xi2 right of it.
///
/// Boundary nodes carry the formula values; the inviscid state does not satisfy the Dirichlet data.
/// A node sitting exactly on the jump takes the mean of the one-sided limits.
inline HyperbolicSteady hyperbolic_steady(double xi1, double xi2, const Grid& grid) {
    const double ell = grid.ell();
    if (!(0.0 <= xi1 && xi1 <= xi2 && xi2 <= ell))
        fail(ErrorKind::DomainViolation, "hyperbolic_steady needs 0 <= xi1 <= xi2 <= ell");
    const double tol = 1e-12 * ell;
    const bool a0 = xi1 <= tol, bl = xi2 >= ell - tol, diag = xi2 - xi1 <= tol;
    HyperbolicCase kind = HyperbolicCase::interior;
    if (a0 && bl) kind = HyperbolicCase::vertex_ns;
    else if (a0 && diag) kind = HyperbolicCase::vertex_plus;
    else if (bl && diag) kind = HyperbolicCase::vertex_minus;
    else if (diag) kind = HyperbolicCase::diagonal;
    else if (a0) kind = HyperbolicCase::side_gamma1;
    else if (bl) kind = HyperbolicCase::side_gamma2;

    const double jump = 0.5 * (xi1 + xi2);
    Field f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        if (diag) f[i] = x - xi1;
        else if (x < jump) f[i] = x - xi1;
        else if (x > jump) f[i] = x - xi2;
        else f[i] = x - jump;
    }
    return {std::move(f), kind, xi1, xi2};
}

enum class Construction { tanh_matched, exact_matched };

struct ApproxSteadyState {
    double eps;
    double xi;
    Field field;
    Field d_xi;
    Construction construction;
    /// Slope jump at xi for the exact-matched construction, zero otherwise.
    double slope_jump = 0.0;
};

/// The tanh-matched family member evaluated at a point.
inline double tanh_family(double x, double xi, double eps, double ell) {
    const double right = -(ell - xi) * std::tanh((ell - xi) * (x - ell) / (2.0 * eps));
    const double left = -xi * std::tanh(xi * x / (2.0 * eps));
    return std::max(std::min(x - xi, right), left);
}

namespace detail {

inline Field tanh_field(double eps, double xi, const Grid& grid) {
    const double ell = grid.ell();
    Field f = Field::sample(grid, [&](double x) { return tanh_family(x, xi, eps, ell); });
    f.clamp_dirichlet();
    return f;
}

}  // namespace detail

inline ApproxSteadyState approx_state(double eps, double xi, const Grid& grid) {
    const double ell = grid.ell();
    if (!(eps > 0.0)) fail(ErrorKind::DomainViolation, "eps must be positive");
    if (!(xi > 0.0 && xi < ell)) fail(ErrorKind::DomainViolation, "xi must lie in (0, ell)");
    const double h = 1e-6 * ell;
    const Field plus = detail::tanh_field(eps, xi + h, grid);
    const Field minus = detail::tanh_field(eps, xi - h, grid);
    Field d = (1.0 / (2.0 * h)) * (plus - minus);
    d.clamp_dirichlet();
    return {eps, xi, detail::tanh_field(eps, xi, grid), std::move(d), Construction::tanh_matched, 0.0};
}

/// Inner boundary of the left layer and outer boundary of the right layer of the tanh family.
struct MatchingPoints {
    double u1s;
    double u2s;
    double u1_asym;
    double u2_asym;
};

inline MatchingPoints matching_points(double eps, double xi, double ell) {
    if (!(xi > 0.0 && xi < ell)) fail(ErrorKind::NoRoot, "matching points need xi in (0, ell)");
    auto bisect = [](auto&& g, double lo, double hi) {
        double glo = g(lo);
        const double ghi = g(hi);
        if (!(glo * ghi < 0.0)) fail(ErrorKind::NoRoot, "no sign change in the matching bracket");
        for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = g(mid);
            if (gm == 0.0) return mid;
            if ((gm < 0.0) == (glo < 0.0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };
    const double r = ell - xi;
    const double u1 = bisect([&](double u) { return -xi * std::tanh(xi * u / (2.0 * eps)) - (u - xi); }, 0.0, xi);
    const double u2 = bisect([&](double u) { return -r * std::tanh(r * (u - ell) / (2.0 * eps)) - (u - xi); }, xi, ell);
    return {u1, u2, eps * xi, ell - eps * xi};
}

/// The slow interface speed of the asymptotic model, xi^2 eps + (ell - xi) xi eps with a minus sign.
inline double theta_asymptotic(double eps, double xi, double ell) { return -(xi * xi * eps + (ell - xi) * xi * eps); }

struct ResidualReport {
    double omega_big = 0.0;
    double omega_small = 0.0;
    double theta = 0.0;
    double theta_asym = 0.0;
    double asymptotic_ratio = 0.0;
    bool theta_from_spectrum = false;
};

/// Residual size, comparison function and interface speed of a family member.
///
/// With psi1 supplied the speed is <psi1, P[U]> / <psi1, dU/dxi>; otherwise the asymptotic value.
inline ResidualReport residual_report(const ApproxSteadyState& state, const FluxFunction& flux,
                                      const std::optional<Field>& psi1 = std::nullopt) {
    const Grid& g = state.field.grid();
    if (!(g.dx() < state.eps / 5.0)) fail(ErrorKind::UnresolvedLayer, "dx must be below eps/5");
    const double ell = g.ell();
    const double asym = state.xi * state.xi * state.eps + (ell - state.xi) * state.xi * state.eps;
    const Field res = stationary_residual(state.field, state.eps, flux);
    ResidualReport r;
    r.omega_big = state.construction == Construction::exact_matched ? std::abs(state.slope_jump) : norm_l1(res);
    r.omega_small = r.omega_big / state.xi;
    r.theta_asym = -asym;
    r.asymptotic_ratio = r.omega_big / asym;
    if (psi1) {
        r.theta = inner_product(*psi1, res) / inner_product(*psi1, state.d_xi);
        r.theta_from_spectrum = true;
    } else {
        r.theta = r.theta_asym;
    }
    return r;
}

namespace detail {

struct MatchedField {
    Field field;
    double slope_jump;
};

inline MatchedField matched_field(double eps, double xi, const FluxFunction& flux, const Grid& grid,
                                  const ShootingOptions& opt) {
    std::vector<std::size_t> li, ri;
    std::vector<double> ls, rs;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double x = grid.x(i);
        if (x < xi) {
            li.push_back(i);
            ls.push_back(x);
        } else if (x > xi) {
            ri.push_back(i);
            rs.push_back(x - xi);
        }
    }
    const ArcSolution la = solve_arc(ArcSign::negative, eps, flux, xi, ls, opt);
    const ArcSolution ra = solve_arc(ArcSign::positive, eps, flux, grid.ell() - xi, rs, opt);
    Field f(grid);
    for (std::size_t j = 0; j < li.size(); ++j) f[li[j]] = la.u[j];
    for (std::size_t j = 0; j < ri.size(); ++j) f[ri[j]] = ra.u[j];
    return {std::move(f), ra.slope_left - la.slope_right};
}

}  // namespace detail

/// Negative exact arc on (0, xi) glued to the positive exact arc on (xi, ell).
inline ApproxSteadyState exact_matched_state(double eps, double xi, const FluxFunction& flux, const Grid& grid,
                                             const ShootingOptions& opt = {}) {
    const double ell = grid.ell();
    if (!(xi > 0.0 && xi < ell)) fail(ErrorKind::DomainViolation, "xi must lie in (0, ell)");
    const double h = 1e-6 * ell;
    auto mid = detail::matched_field(eps, xi, flux, grid, opt);
    const auto plus = detail::matched_field(eps, xi + h, flux, grid, opt);
    const auto minus = detail::matched_field(eps, xi - h, flux, grid, opt);
    Field d = (1.0 / (2.0 * h)) * (plus.field - minus.field);
    d.clamp_dirichlet();
    return {eps, xi, std::move(mid.field), std::move(d), Construction::exact_matched, mid.slope_jump};
}

inline ApproxSteadyState exact_matched_state(double eps, double xi, const Grid& grid) {
    return exact_matched_state(eps, xi, burgers_flux(), grid);
}

}  // namespace slowmotion
