#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "slowmotion/core.hpp"
#include "slowmotion/error.hpp"
#include "slowmotion/family.hpp"
#include "slowmotion/spectral.hpp"
#include "slowmotion/stationary.hpp"
#include "slowmotion/tridiag.hpp"

namespace slowmotion {

enum class InitialShape { piecewise_linear, scaled_sine };

/// paper_u0meta: negative on (0, a0), positive on (a0, ell). corollary: the mirrored sign pattern.
enum class Orientation { paper_u0meta, corollary };

struct InitialDatum {
    double a0;
    InitialShape shape = InitialShape::scaled_sine;
    double amplitude = 0.5;
    Orientation orientation = Orientation::paper_u0meta;
};

inline Field make_initial(const InitialDatum& d, const Grid& grid) {
    const double ell = grid.ell();
    if (!(d.a0 > 0.0 && d.a0 < ell)) fail(ErrorKind::DomainViolation, "a0 must lie in (0, ell)");
    if (!(d.amplitude > 0.0)) fail(ErrorKind::DomainViolation, "amplitude must be positive");
    const double pi = std::acos(-1.0);
    const double a0 = d.a0, A = d.amplitude;
    const double sgn = d.orientation == Orientation::paper_u0meta ? 1.0 : -1.0;
    Field u = Field::sample(grid, [&](double x) {
        double v = 0.0;
        if (d.shape == InitialShape::scaled_sine) {
            v = x <= a0 ? -A * std::sin(pi * x / a0) : A * std::sin(pi * (x - a0) / (ell - a0));
        } else {
            v = x <= a0 ? -A * (1.0 - std::abs(2.0 * x / a0 - 1.0))
                        : A * (1.0 - std::abs(2.0 * (x - a0) / (ell - a0) - 1.0));
        }
        return sgn * v;
    });
    u.clamp_dirichlet();
    if (std::abs(a0 - 0.5 * ell) <= 1e-14 * ell) {
        // Centered datum: mirror the left half so the field is exactly odd on the node lattice.
        const std::size_t m = u.size() - 1;
        for (std::size_t i = 0; 2 * i < m; ++i) u[m - i] = -u[i];
        if (m % 2 == 0) u[m / 2] = 0.0;
    }
    return u;
}

/// Stable branch the Corollary predicts for a datum: the wall nearer to a0 captures the interface.
inline BranchKind predicted_attractor(const InitialDatum& d, double ell) {
    const bool left = d.a0 < 0.5 * ell;
    if (d.orientation == Orientation::paper_u0meta) return left ? BranchKind::positive : BranchKind::negative;
    return left ? BranchKind::negative : BranchKind::positive;
}

/// Local Lax-Friedrichs interface fluxes F_{i+1/2}, i = 0..n.
inline std::vector<double> llf_fluxes(const Field& u, const FluxFunction& flux) {
    std::vector<double> F(u.size() - 1);
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double a = std::max(std::abs(flux.df(u[i])), std::abs(flux.df(u[i + 1])));
        F[i] = 0.5 * (flux.f(u[i]) + flux.f(u[i + 1])) - 0.5 * a * (u[i + 1] - u[i]);
    }
    return F;
}

inline double cfl_limit(const Field& u, const FluxFunction& flux, double cfl = 0.4) {
    double a = 1.0;
    for (double v : u.values()) a = std::max(a, std::abs(flux.df(v)));
    return cfl * u.grid().dx() / a;
}

/// Explicit LLF convection and reaction, then backward-Euler diffusion, at a fixed dt.
///
/// The diffusion solve is two-sided so that odd data about ell/2 stay exactly odd.
class ImexStepper {
public:
    ImexStepper(const Grid& grid, double eps, double dt, FluxFunction flux)
        : grid_(grid), eps_(eps), dt_(dt), flux_(std::move(flux)) {
        if (!(dt > 0.0)) fail(ErrorKind::DomainViolation, "dt must be positive");
        if (!(eps > 0.0)) fail(ErrorKind::DomainViolation, "eps must be positive");
        const double r = eps * dt / (grid.dx() * grid.dx());
        Tridiagonal a(grid.interior());
        for (auto& d : a.diag) d = 1.0 + 2.0 * r;
        for (std::size_t i = 0; i + 1 < a.size(); ++i) a.lower[i] = a.upper[i] = -r;
        solver_ = TwistedFactorization(a);
        F_.resize(grid.size() - 1);
        rhs_.resize(grid.interior());
    }

    double dt() const noexcept { return dt_; }

    void step(Field& u) {
        const std::size_t m = u.size() - 1;
        const double dx = grid_.dx();
        double amax = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double al = std::abs(flux_.df(u[i])), ar = std::abs(flux_.df(u[i + 1]));
            const double a = std::max(al, ar);
            amax = std::max(amax, a);
            F_[i] = 0.5 * (flux_.f(u[i]) + flux_.f(u[i + 1])) - 0.5 * a * (u[i + 1] - u[i]);
        }
        if (dt_ > 0.4 * dx / amax * (1.0 + 1e-12))
            fail(ErrorKind::CFLViolation, "dt exceeds 0.4 dx / max(1, |f'(u)|)");
        const double c = dt_ / dx;
        for (std::size_t i = 1; i < m; ++i) rhs_[i - 1] = u[i] - c * (F_[i] - F_[i - 1]) + dt_ * flux_.df(u[i]);
        solver_.solve(rhs_);
        for (std::size_t i = 1; i < m; ++i) {
            if (!std::isfinite(rhs_[i - 1])) fail(ErrorKind::NaNDetected, "non-finite value in time step");
            u[i] = rhs_[i - 1];
        }
        u[0] = 0.0;
        u[m] = 0.0;
    }

private:
    Grid grid_;
    double eps_, dt_;
    FluxFunction flux_;
    TwistedFactorization solver_;
    std::vector<double> F_, rhs_;
};

inline Field step_imex(const Field& u, double dt, double eps, const FluxFunction& flux) {
    if (!u.satisfies_dirichlet()) fail(ErrorKind::DomainViolation, "step_imex needs zero boundary values");
    ImexStepper s(u.grid(), eps, dt, flux);
    Field out = u;
    s.step(out);
    return out;
}

/// y(x) = -int_0^x u, the flame front attached to a state.
inline Field flame_front(const Field& u) {
    Field y(u.grid());
    const double dx = u.grid().dx();
    for (std::size_t i = 1; i < u.size(); ++i) y[i] = y[i - 1] - 0.5 * dx * (u[i - 1] + u[i]);
    return y;
}

/// Zero crossing when the interior has exactly one sign change; NaN otherwise.
inline double interface_zero(const Field& u) {
    const auto zc = zero_crossings(u);
    return zc.size() == 1 ? zc.front() : std::numeric_limits<double>::quiet_NaN();
}

struct Projection {
    double xi = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    /// |<psi_1(xi), u - U(xi)>|.
    double residual = std::numeric_limits<double>::quiet_NaN();
};

/// Root of g(xi) = <psi_1(xi), u - U(xi)> bracketed around the seed and refined by TOMS 748.
inline Projection project_interface(const Field& u, const SpectralProvider& provider, double seed) {
    const double ell = provider.grid().ell();
    const double lo_lim = std::max(1e-3 * ell, 2.0 * provider.grid().dx());
    const double hi_lim = ell - lo_lim;
    auto g = [&](double xi) {
        const auto s = provider.state(xi);
        return inner_product(provider.psi1(s), u - s.field);
    };
    Projection out;
    if (!std::isfinite(seed)) return out;
    seed = std::clamp(seed, lo_lim, hi_lim);
    const double gs = g(seed);
    if (gs == 0.0) return {seed, true, 0.0};
    double a = seed, b = seed, fa = gs, fb = gs;
    bool found = false;
    for (double delta : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        const double l = std::max(lo_lim, seed - delta * ell), r = std::min(hi_lim, seed + delta * ell);
        const double gl = g(l), gr = g(r);
        // Prefer the bracket on the side nearer the seed.
        if (gl * gs <= 0.0) {
            a = l; fa = gl; b = seed; fb = gs; found = true;
        }
        if (!found && gr * gs <= 0.0) {
            a = seed; fa = gs; b = r; fb = gr; found = true;
        }
        if (found) break;
    }
    if (!found) return out;
    std::uintmax_t iters = 200;
    const double tol_x = 1e-13 * ell;
    auto tol = [tol_x](double x0, double x1) { return std::abs(x1 - x0) <= tol_x; };
    const auto [r0, r1] = boost::math::tools::toms748_solve(g, a, b, fa, fb, tol, iters);
    const double xi = 0.5 * (r0 + r1);
    return {xi, true, std::abs(g(xi))};
}

struct EvolveOptions {
    double record_stride = 1.0;
    /// Store a snapshot at every recorded time.
    bool store_all_snapshots = false;
    /// Extra snapshot times; matched to the nearest recorded time.
    std::vector<double> snapshot_times;
    /// Formation threshold on |v|_{L2} as a fraction of the current |u|_{L2}.
    double tform_ratio = 0.1;
    bool track_projection = true;
    /// Stop after the first record past this time at which the solution has no interior sign change.
    double stop_without_interface_after = std::numeric_limits<double>::infinity();
};

struct Trajectory {
    double eps = 0.0;
    double dt = 0.0;
    std::size_t k_max = 0;
    double u0_l2 = 0.0;
    std::vector<double> times;
    std::vector<double> xi_zero;
    std::vector<double> xi_proj;
    std::vector<double> v_l2;
    std::vector<double> v_h1;
    std::vector<double> u_l2;
    /// |<psi_1(xi_proj), v>| at each record.
    std::vector<double> projection_residual;
    std::vector<std::vector<double>> modal;
    std::vector<std::pair<double, Field>> snapshots;
    std::optional<double> t_form;

    /// Interface position: projection when available, otherwise zero crossing.
    double xi(std::size_t j) const { return std::isfinite(xi_proj[j]) ? xi_proj[j] : xi_zero[j]; }
};

inline double auto_dt(const Field& u0, const FluxFunction& flux) {
    const double ell = u0.grid().ell();
    double a = std::max({1.0, std::abs(flux.df(ell)), std::abs(flux.df(-ell))});
    for (double v : u0.values()) a = std::max(a, std::abs(flux.df(v)));
    return 0.4 * u0.grid().dx() / a;
}

namespace detail {

inline void record(Trajectory& tr, double t, const Field& u, const SpectralProvider* provider,
                   const EvolveOptions& opt, double prev_xi) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    tr.times.push_back(t);
    const double xz = interface_zero(u);
    tr.xi_zero.push_back(xz);
    tr.u_l2.push_back(norm_l2(u));
    std::vector<double> modal(tr.k_max, nan);
    double xp = nan, vl2 = nan, vh1 = nan, pres = nan;
    if (provider && opt.track_projection) {
        const double seed = std::isfinite(xz) ? xz : prev_xi;
        const Projection p = project_interface(u, *provider, seed);
        if (p.ok) {
            xp = p.xi;
            const auto s = provider->state(xp);
            const SpectralData sd = provider->spectral(s, tr.k_max);
            const Field v = u - s.field;
            vl2 = norm_l2(v);
            vh1 = norm_h1(v);
            for (std::size_t k = 0; k < tr.k_max; ++k) modal[k] = inner_product(sd.psis[k], v);
            pres = std::abs(modal[0]);
        }
    }
    tr.xi_proj.push_back(xp);
    tr.v_l2.push_back(vl2);
    tr.v_h1.push_back(vh1);
    tr.projection_residual.push_back(pres);
    tr.modal.push_back(std::move(modal));
    if (!tr.t_form && std::isfinite(vl2) && vl2 < opt.tform_ratio * tr.u_l2.back()) tr.t_form = t;
}

}  // namespace detail

/// Integrates to T, recording interface trackers, perturbation norms and modal coefficients.
///
/// dt <= 0 selects the automatic step. The step is shortened so records fall on exact multiples.
inline Trajectory evolve(const Field& u0, double T, double dt, double eps, const FluxFunction& flux,
                         const SpectralProvider* provider, const EvolveOptions& opt = {}) {
    if (!(T >= 0.0)) fail(ErrorKind::DomainViolation, "T must be nonnegative");
    if (!(opt.record_stride > 0.0)) fail(ErrorKind::DomainViolation, "record stride must be positive");
    const double limit = auto_dt(u0, flux);
    if (dt <= 0.0) dt = limit;
    if (dt > cfl_limit(u0, flux) * (1.0 + 1e-12)) fail(ErrorKind::CFLViolation, "initial dt violates the CFL bound");
    const std::size_t per = static_cast<std::size_t>(std::ceil(opt.record_stride / dt - 1e-9));
    const double h = opt.record_stride / static_cast<double>(per);

    Trajectory tr;
    tr.eps = eps;
    tr.dt = h;
    tr.k_max = provider ? provider->k_max() : 0;
    tr.u0_l2 = norm_l2(u0);
    Field u = u0;
    u.clamp_dirichlet();
    ImexStepper stepper(u.grid(), eps, h, flux);

    std::vector<double> snaps = opt.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    std::size_t next_snap = 0;
    auto maybe_snapshot = [&](double t) {
        bool stored = false;
        while (next_snap < snaps.size() && snaps[next_snap] <= t + 0.5 * opt.record_stride) {
            if (!stored) tr.snapshots.emplace_back(t, u);
            stored = true;
            ++next_snap;
        }
        if (!stored && opt.store_all_snapshots) tr.snapshots.emplace_back(t, u);
    };

    double prev_xi = std::numeric_limits<double>::quiet_NaN();
    detail::record(tr, 0.0, u, provider, opt, prev_xi);
    maybe_snapshot(0.0);
    const std::size_t records = static_cast<std::size_t>(std::floor(T / opt.record_stride + 1e-9));
    for (std::size_t r = 1; r <= records; ++r) {
        for (std::size_t s = 0; s < per; ++s) stepper.step(u);
        const double t = static_cast<double>(r) * opt.record_stride;
        prev_xi = tr.xi(tr.times.size() - 1);
        detail::record(tr, t, u, provider, opt, prev_xi);
        maybe_snapshot(t);
        if (t > opt.stop_without_interface_after && zero_crossings(u).empty()) break;
    }
    return tr;
}

enum class ThetaSource { asymptotic, spectral };

struct ReducedSolution {
    std::vector<double> times;
    std::vector<double> xi;
    double beta = 0.0;
    ThetaSource theta_source = ThetaSource::asymptotic;
};

struct ReducedOptions {
    double output_stride = 0.1;
    double rtol = 1e-10;
    double atol = 1e-14;
    double xi_bar = 0.0;
};

/// Least-squares decay rate of |xi - xi_bar| on a log scale.
inline double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& xi, double xi_bar) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    std::size_t m = 0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        const double d = std::abs(xi[j] - xi_bar);
        if (!(d > 0.0) || !std::isfinite(d)) continue;
        const double y = std::log(d);
        st += t[j];
        sy += y;
        stt += t[j] * t[j];
        sty += t[j] * y;
        ++m;
    }
    if (m < 2) return 0.0;
    const double mm = static_cast<double>(m);
    return -(mm * sty - st * sy) / (mm * stt - st * st);
}

/// d xi / dt = theta(xi) by classical RK4 with step-doubling error control.
inline ReducedSolution reduced_ode(double xi0, double T, double eps, double ell, ThetaSource source,
                                   const SpectralProvider* provider = nullptr, const ReducedOptions& opt = {}) {
    if (!(xi0 >= 0.0 && xi0 < ell)) fail(ErrorKind::DomainViolation, "xi0 must lie in [0, ell)");
    if (source == ThetaSource::spectral && !provider) fail(ErrorKind::DomainViolation, "spectral speed needs a provider");
    auto theta = [&](double xi) {
        if (source == ThetaSource::asymptotic) return theta_asymptotic(eps, xi, ell);
        if (!(xi > 0.0)) return 0.0;
        return provider->theta(xi);
    };
    auto rk4 = [&](double y, double h) {
        const double k1 = theta(y);
        const double k2 = theta(y + 0.5 * h * k1);
        const double k3 = theta(y + 0.5 * h * k2);
        const double k4 = theta(y + h * k3);
        return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    ReducedSolution sol;
    sol.theta_source = source;
    sol.times.push_back(0.0);
    sol.xi.push_back(xi0);
    double t = 0.0, y = xi0, h = std::min(opt.output_stride, 0.1);
    const std::size_t outputs = static_cast<std::size_t>(std::floor(T / opt.output_stride + 1e-9));
    for (std::size_t j = 1; j <= outputs; ++j) {
        const double target = static_cast<double>(j) * opt.output_stride;
        while (t < target) {
            const double hh = std::min(h, target - t);
            const double full = rk4(y, hh);
            const double half = rk4(rk4(y, 0.5 * hh), 0.5 * hh);
            const double err = std::abs(half - full) / 15.0;
            const double tol = opt.rtol * std::abs(half) + opt.atol;
            if (err <= tol || hh < 1e-12) {
                t = (hh == target - t) ? target : t + hh;
                y = half + (half - full) / 15.0;
                h = hh * std::min(4.0, 0.9 * std::pow(tol / std::max(err, 1e-300), 0.2));
            } else {
                h = hh * std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
            }
        }
        sol.times.push_back(target);
        sol.xi.push_back(y);
    }
    sol.beta = fit_decay_rate(sol.times, sol.xi, opt.xi_bar);
    return sol;
}

/// First recorded time after formation with |xi(t) - xi(t_form)| > delta.
///
/// A vanished interface after formation counts as an exit.
inline std::optional<double> exit_time(const Trajectory& tr, double delta) {
    if (!(delta > 0.0)) fail(ErrorKind::DomainViolation, "delta must be positive");
    if (!tr.t_form) return std::nullopt;
    std::size_t j0 = 0;
    while (j0 < tr.times.size() && tr.times[j0] < *tr.t_form) ++j0;
    const double ref = tr.xi(j0);
    for (std::size_t j = j0; j < tr.times.size(); ++j) {
        const double x = tr.xi(j);
        if (!std::isfinite(x) || std::abs(x - ref) > delta) return tr.times[j];
    }
    return std::nullopt;
}

inline std::optional<double> exit_time(const ReducedSolution& sol, double delta) {
    if (!(delta > 0.0)) fail(ErrorKind::DomainViolation, "delta must be positive");
    for (std::size_t j = 0; j < sol.times.size(); ++j)
        if (std::abs(sol.xi[j] - sol.xi.front()) > delta) {
            if (j == 0) return sol.times[0];
            // Linear interpolation between outputs.
            const double d0 = std::abs(sol.xi[j - 1] - sol.xi.front()), d1 = std::abs(sol.xi[j] - sol.xi.front());
            return sol.times[j - 1] + (delta - d0) / (d1 - d0) * (sol.times[j] - sol.times[j - 1]);
        }
    return std::nullopt;
}

struct TheoremRow {
    double t;
    double xi;
    double v_l2;
    double v_h1;
    double z_l2;
    double R_l2;
    double R_h1;
    double H_l2;
    double Mv_l2;
    double Q_l1;
    double Omega;
    double ratio_R_Omega;
    double ratio_Q_vh1sq;
};

struct TheoremReport {
    std::vector<TheoremRow> rows;
    double v0_l2 = 0.0;
    /// max over rows of |R|_{L2} / (Omega (|v0|^2 + 1)).
    double remainder_constant = 0.0;
    double max_ratio_R_Omega = 0.0;
    double min_ratio_Q = 0.0;
    double max_ratio_Q = 0.0;
};

/// Decomposition v = z + R along a stored trajectory, with the linear-theory terms measured.
inline TheoremReport theorem_diagnostics(const Trajectory& tr, const SpectralProvider& provider,
                                         std::size_t lattice_points = 41) {
    if (tr.snapshots.size() != tr.times.size()) fail(ErrorKind::MissingSnapshots, "every recorded time needs a snapshot");
    std::vector<std::size_t> valid;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t j = 0; j < tr.times.size(); ++j)
        if (std::isfinite(tr.xi_proj[j])) {
            valid.push_back(j);
            lo = std::min(lo, tr.xi_proj[j]);
            hi = std::max(hi, tr.xi_proj[j]);
        }
    TheoremReport rep;
    if (valid.empty() || valid.front() != 0) return rep;
    const double ell = provider.grid().ell();
    const double pad = 0.01 * ell;
    const LambdaTable table(provider, std::max(lo - pad, 2e-3 * ell), std::min(hi + pad, ell - 2e-3 * ell), lattice_points);
    const std::size_t K = provider.k_max();
    const FluxFunction& flux = provider.flux();
    const double eps = provider.eps();
    const double dx = provider.grid().dx();

    std::vector<double> integral(K, 0.0);
    const std::vector<double>& v0 = tr.modal[0];
    rep.v0_l2 = tr.v_l2[0];
    rep.min_ratio_Q = std::numeric_limits<double>::infinity();
    double t_prev = 0.0, xi_prev = tr.xi_proj[0];
    for (std::size_t j : valid) {
        const double t = tr.times[j], xi = tr.xi_proj[j];
        for (std::size_t k = 1; k < K; ++k)
            integral[k] += 0.5 * (t - t_prev) * (table.lambda(k + 1, xi_prev) + table.lambda(k + 1, xi));
        t_prev = t;
        xi_prev = xi;

        const auto s = provider.state(xi);
        const SpectralData sd = provider.spectral(s, K);
        const Field& u = tr.snapshots[j].second;
        const Field v = u - s.field;
        Field z(provider.grid());
        for (std::size_t k = 1; k < K; ++k) z += (v0[k] * std::exp(integral[k])) * sd.phis[k];
        const Field R = v - z;

        const Field P = stationary_residual(s.field, eps, flux);
        const double theta = inner_product(sd.psis[0], P);
        const Field H = P - theta * s.d_xi;
        const auto dpsi = dxi_psis(provider, xi, sd);
        const Field Mv = (-theta * inner_product(dpsi[0], v)) * s.d_xi;
        Field Q(provider.grid());
        for (std::size_t i = 1; i + 1 < Q.size(); ++i) {
            const double qp = flux.d2f(s.field[i + 1]) * v[i + 1] * v[i + 1];
            const double qm = flux.d2f(s.field[i - 1]) * v[i - 1] * v[i - 1];
            Q[i] = 0.5 * (-(qp - qm) / (2.0 * dx) + flux.d3f(s.field[i]) * v[i] * v[i]);
        }
        TheoremRow row{};
        row.t = t;
        row.xi = xi;
        row.v_l2 = norm_l2(v);
        row.v_h1 = norm_h1(v);
        row.z_l2 = norm_l2(z);
        row.R_l2 = norm_l2(R);
        row.R_h1 = norm_h1(R);
        row.H_l2 = norm_l2(H);
        row.Mv_l2 = norm_l2(Mv);
        row.Q_l1 = norm_l1(Q);
        row.Omega = norm_l1(P);
        row.ratio_R_Omega = row.R_l2 / row.Omega;
        row.ratio_Q_vh1sq = row.v_h1 > 0.0 ? row.Q_l1 / (row.v_h1 * row.v_h1) : 0.0;
        rep.remainder_constant = std::max(rep.remainder_constant, row.R_l2 / (row.Omega * (rep.v0_l2 * rep.v0_l2 + 1.0)));
        rep.max_ratio_R_Omega = std::max(rep.max_ratio_R_Omega, row.ratio_R_Omega);
        if (row.v_h1 > 0.0) {
            rep.min_ratio_Q = std::min(rep.min_ratio_Q, row.ratio_Q_vh1sq);
            rep.max_ratio_Q = std::max(rep.max_ratio_Q, row.ratio_Q_vh1sq);
        }
        rep.rows.push_back(row);
    }
    if (!std::isfinite(rep.min_ratio_Q)) rep.min_ratio_Q = 0.0;
    return rep;
}

/// Least-squares slope of ln|v_k| over recorded times in [t0, t1].
inline double modal_log_slope(const Trajectory& tr, std::size_t k, double t0, double t1) {
    std::vector<double> t, y;
    for (std::size_t j = 0; j < tr.times.size(); ++j) {
        if (tr.times[j] < t0 - 1e-12 || tr.times[j] > t1 + 1e-12) continue;
        const double c = tr.modal[j][k - 1];
        if (!std::isfinite(c) || c == 0.0) continue;
        t.push_back(tr.times[j]);
        y.push_back(std::abs(c));
    }
    return -fit_decay_rate(t, y, 0.0);
}

/// Mean of lambda_k along the projected path over [t0, t1].
inline double mean_lambda_along(const Trajectory& tr, const LambdaTable& table, std::size_t k, double t0, double t1) {
    double acc = 0.0, span = 0.0;
    for (std::size_t j = 1; j < tr.times.size(); ++j) {
        if (tr.times[j - 1] < t0 - 1e-12 || tr.times[j] > t1 + 1e-12) continue;
        if (!std::isfinite(tr.xi_proj[j - 1]) || !std::isfinite(tr.xi_proj[j])) continue;
        const double dt = tr.times[j] - tr.times[j - 1];
        acc += 0.5 * dt * (table.lambda(k, tr.xi_proj[j - 1]) + table.lambda(k, tr.xi_proj[j]));
        span += dt;
    }
    return span > 0.0 ? acc / span : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace slowmotion
