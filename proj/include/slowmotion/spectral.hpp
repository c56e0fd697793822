#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <lapacke.h>

#include "slowmotion/core.hpp"
#include "slowmotion/error.hpp"
#include "slowmotion/family.hpp"
#include "slowmotion/tridiag.hpp"

namespace slowmotion {

/// Interior-node matrix of v -> eps v'' - (f'(U) v)' + f''(U) v with Dirichlet rows eliminated.
struct LinearizedOperator {
    Grid grid;
    double eps;
    Tridiagonal matrix;
};

inline LinearizedOperator assemble(double eps, const Field& state, const FluxFunction& flux) {
    const Grid& g = state.grid();
    if (!(g.dx() < eps / 5.0)) fail(ErrorKind::UnresolvedLayer, "dx must be below eps/5");
    const std::size_t n = g.interior();
    const double dx = g.dx();
    const double c2 = eps / (dx * dx);
    const double c1 = 1.0 / (2.0 * dx);
    Tridiagonal a(n);
    for (std::size_t r = 0; r < n; ++r) a.diag[r] = -2.0 * c2 + flux.d2f(state[r + 1]);
    for (std::size_t r = 0; r + 1 < n; ++r) {
        a.lower[r] = c2 + c1 * flux.df(state[r + 1]);
        a.upper[r] = c2 - c1 * flux.df(state[r + 2]);
    }
    return {g, eps, std::move(a)};
}

inline LinearizedOperator assemble(double eps, const ApproxSteadyState& state, const FluxFunction& flux) {
    return assemble(eps, state.field, flux);
}

/// Applies the operator to a nodal field; boundary values of the result are zero.
inline Field apply(const LinearizedOperator& op, const Field& v) {
    std::vector<double> in(v.data().begin() + 1, v.data().end() - 1);
    const auto out = op.matrix.apply(in);
    Field r(op.grid);
    std::copy(out.begin(), out.end(), r.values().begin() + 1);
    return r;
}

struct SpectralData {
    double eps = 0.0;
    double xi = 0.0;
    /// Sorted decreasing.
    std::vector<double> lambdas;
    std::vector<Field> phis;
    std::vector<Field> psis;
    std::size_t k_max = 0;
    bool dense_fallback = false;
    /// Largest imaginary part seen when the dense fallback ran.
    double max_imag = 0.0;
};

/// Log of the diagonal similarity that symmetrizes the operator, logd[0] = 0.
inline std::vector<double> symmetrizer_log_weights(const LinearizedOperator& op) {
    const auto& a = op.matrix;
    std::vector<double> logd(a.size(), 0.0);
    for (std::size_t r = 0; r + 1 < a.size(); ++r)
        logd[r + 1] = logd[r] + 0.5 * (std::log(a.upper[r]) - std::log(a.lower[r]));
    return logd;
}

inline bool sign_condition(const LinearizedOperator& op) {
    const auto& a = op.matrix;
    for (std::size_t r = 0; r + 1 < a.size(); ++r)
        if (!(a.lower[r] > 0.0 && a.upper[r] > 0.0)) return false;
    return true;
}

/// eps times the symmetric conjugate of the operator (the self-adjoint form).
inline Tridiagonal self_adjoint_conjugate(const LinearizedOperator& op) {
    if (!sign_condition(op)) fail(ErrorKind::SignConditionViolated, "off-diagonal products are not positive");
    const auto& a = op.matrix;
    Tridiagonal s(a.size());
    for (std::size_t r = 0; r < a.size(); ++r) s.diag[r] = op.eps * a.diag[r];
    for (std::size_t r = 0; r + 1 < a.size(); ++r) s.lower[r] = s.upper[r] = op.eps * std::sqrt(a.lower[r] * a.upper[r]);
    return s;
}

namespace detail {

/// Top-k eigenpairs of a symmetric tridiagonal matrix, eigenvalues decreasing.
inline void sym_tridiagonal_top(const std::vector<double>& d, const std::vector<double>& e, std::size_t k,
                                std::vector<double>& w, std::vector<double>& z) {
    const lapack_int n = static_cast<lapack_int>(d.size());
    std::vector<double> dd = d, ee(d.size(), 0.0);
    std::copy(e.begin(), e.end(), ee.begin());
    std::vector<double> ww(d.size());
    std::vector<double> zz(d.size() * k);
    std::vector<lapack_int> isuppz(2 * k);
    lapack_int m = 0;
    const lapack_int il = n - static_cast<lapack_int>(k) + 1;
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, dd.data(), ee.data(), 0.0, 0.0, il, n, 0.0, &m,
                                           ww.data(), zz.data(), n, isuppz.data());
    if (info != 0 || m != static_cast<lapack_int>(k))
        fail(ErrorKind::NonConvergence, "symmetric tridiagonal eigensolver failed");
    w.assign(k, 0.0);
    z.assign(d.size() * k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t src = k - 1 - j;
        w[j] = ww[src];
        std::copy(zz.begin() + src * d.size(), zz.begin() + (src + 1) * d.size(), z.begin() + j * d.size());
    }
}

inline Field embed(const Grid& g, const double* interior) {
    Field f(g);
    std::copy(interior, interior + g.interior(), f.values().begin() + 1);
    return f;
}

inline void orient_max_positive(Field& phi, Field& psi) {
    std::size_t arg = 0;
    for (std::size_t i = 0; i < phi.size(); ++i)
        if (std::abs(phi[i]) > std::abs(phi[arg])) arg = i;
    if (phi[arg] < 0.0) {
        phi *= -1.0;
        psi *= -1.0;
    }
}

inline void dense_eigensolve(const LinearizedOperator& op, std::size_t k, SpectralData& out) {
    const std::size_t n = op.matrix.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) a(r, r) = op.matrix.diag[r];
    for (std::size_t r = 0; r + 1 < n; ++r) {
        a(r + 1, r) = op.matrix.lower[r];
        a(r, r + 1) = op.matrix.upper[r];
    }
    Eigen::EigenSolver<Eigen::MatrixXd> right(a), left(a.transpose());
    if (right.info() != Eigen::Success || left.info() != Eigen::Success)
        fail(ErrorKind::NonConvergence, "dense eigensolver failed");
    auto order = [](const Eigen::VectorXcd& ev) {
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(ev.size()));
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        std::stable_sort(idx.begin(), idx.end(), [&](auto i, auto j) { return ev[i].real() > ev[j].real(); });
        return idx;
    };
    const Eigen::VectorXcd er = right.eigenvalues(), el = left.eigenvalues();
    const auto ir = order(er), il = order(el);
    for (std::size_t j = 0; j < k; ++j) {
        out.max_imag = std::max(out.max_imag, std::abs(er[ir[j]].imag()));
        out.lambdas.push_back(er[ir[j]].real());
        Eigen::VectorXd vr = right.eigenvectors().col(ir[j]).real();
        Eigen::VectorXd vl = left.eigenvectors().col(il[j]).real();
        Field phi = embed(op.grid, vr.data());
        Field psi = embed(op.grid, vl.data());
        phi *= 1.0 / norm_l2(phi);
        psi *= 1.0 / inner_product(psi, phi);
        orient_max_positive(phi, psi);
        out.phis.push_back(std::move(phi));
        out.psis.push_back(std::move(psi));
    }
}

}  // namespace detail

/// Leading k_max eigenpairs with adjoint eigenfunctions, biorthonormal in the trapezoid pairing.
///
/// When d_xi is given the first pair is scaled so that <psi_1, d_xi> = 1; otherwise |phi_1| = 1.
/// Every phi_k with k >= 2 has unit norm and its largest entry positive.
inline SpectralData eigensolve(const LinearizedOperator& op, std::size_t k_max = 8, const Field* d_xi = nullptr) {
    const std::size_t n = op.matrix.size();
    k_max = std::min(k_max, n);
    SpectralData out;
    out.eps = op.eps;
    out.k_max = k_max;
    if (!sign_condition(op)) {
        out.dense_fallback = true;
        detail::dense_eigensolve(op, k_max, out);
        if (out.max_imag > 1e-10) fail(ErrorKind::SignConditionViolated, "spectrum is not real");
    } else {
        const auto logd = symmetrizer_log_weights(op);
        const auto [mn, mx] = std::minmax_element(logd.begin(), logd.end());
        const double shift = 0.5 * (*mn + *mx);
        std::vector<double> e(n - 1);
        for (std::size_t r = 0; r + 1 < n; ++r) e[r] = std::sqrt(op.matrix.lower[r] * op.matrix.upper[r]);
        std::vector<double> w, z;
        detail::sym_tridiagonal_top(op.matrix.diag, e, k_max, w, z);
        const double dx = op.grid.dx();
        std::vector<double> p(n), q(n);
        for (std::size_t j = 0; j < k_max; ++j) {
            const double* s = z.data() + j * n;
            for (std::size_t r = 0; r < n; ++r) {
                p[r] = s[r] * std::exp(shift - logd[r]);
                q[r] = s[r] * std::exp(logd[r] - shift) / dx;
            }
            Field phi = detail::embed(op.grid, p.data());
            Field psi = detail::embed(op.grid, q.data());
            const double nrm = norm_l2(phi);
            phi *= 1.0 / nrm;
            psi *= nrm;
            detail::orient_max_positive(phi, psi);
            out.lambdas.push_back(w[j]);
            out.phis.push_back(std::move(phi));
            out.psis.push_back(std::move(psi));
        }
    }
    if (d_xi && k_max > 0) {
        const double c = inner_product(out.psis[0], *d_xi);
        if (!(std::abs(c) > 0.0) || !std::isfinite(c))
            fail(ErrorKind::NonConvergence, "first adjoint eigenfunction is orthogonal to d_xi U");
        out.psis[0] *= 1.0 / c;
        out.phis[0] *= c;
    }
    return out;
}

/// Spectrum of the operator linearized about a family member, normalized with its d_xi.
inline SpectralData spectral_data(const ApproxSteadyState& state, const FluxFunction& flux, std::size_t k_max = 8) {
    const auto op = assemble(state.eps, state.field, flux);
    SpectralData sd = eigensolve(op, k_max, &state.d_xi);
    sd.xi = state.xi;
    return sd;
}

inline ResidualReport residual_report(const ApproxSteadyState& state, const FluxFunction& flux,
                                      const SpectralData& spectral) {
    return residual_report(state, flux, std::optional<Field>(spectral.psis.at(0)));
}

/// lambda_1 ~ (1/eps)[xi(xi - c sqrt(eps)) e^{-xi^2/2eps} + (ell-xi)((ell-xi) - c sqrt(eps)) e^{-(ell-xi)^2/2eps}].
inline double lambda1_asymptotic(double eps, double xi, double ell, double c) {
    const double r = ell - xi;
    const double se = std::sqrt(eps);
    return (xi * (xi - c * se) * std::exp(-xi * xi / (2.0 * eps)) + r * (r - c * se) * std::exp(-r * r / (2.0 * eps))) /
           eps;
}

/// Builds family members and their spectra on demand for a fixed (eps, grid, flux).
///
/// Stateless after construction, so one provider can be shared across threads.
class SpectralProvider {
public:
    SpectralProvider(double eps, FluxFunction flux, Grid grid, std::size_t k_max = 8)
        : eps_(eps), flux_(std::move(flux)), grid_(grid), k_max_(k_max) {
        if (!(grid_.dx() < eps_ / 5.0)) fail(ErrorKind::UnresolvedLayer, "dx must be below eps/5");
    }

    double eps() const noexcept { return eps_; }
    const FluxFunction& flux() const noexcept { return flux_; }
    const Grid& grid() const noexcept { return grid_; }
    std::size_t k_max() const noexcept { return k_max_; }

    ApproxSteadyState state(double xi) const { return approx_state(eps_, xi, grid_); }

    SpectralData spectral(const ApproxSteadyState& s, std::size_t k) const { return spectral_data(s, flux_, k); }
    SpectralData spectral(double xi) const { return spectral(state(xi), k_max_); }

    /// First adjoint eigenfunction only, normalized against d_xi U.
    Field psi1(const ApproxSteadyState& s) const { return spectral(s, 1).psis[0]; }

    /// Interface speed <psi_1, P[U]> / <psi_1, d_xi U>.
    double theta(double xi) const {
        const auto s = state(xi);
        return residual_report(s, flux_, spectral(s, 1)).theta;
    }

private:
    double eps_;
    FluxFunction flux_;
    Grid grid_;
    std::size_t k_max_;
};

/// Eigenvalues tabulated on a uniform xi lattice, linearly interpolated in between.
class LambdaTable {
public:
    LambdaTable() = default;
    LambdaTable(const SpectralProvider& provider, double xi_lo, double xi_hi, std::size_t points) {
        if (points < 2 || !(xi_hi > xi_lo)) fail(ErrorKind::DomainViolation, "lambda table needs an interval");
        lo_ = xi_lo;
        hi_ = xi_hi;
        for (std::size_t j = 0; j < points; ++j) {
            const double xi = xi_lo + (xi_hi - xi_lo) * static_cast<double>(j) / static_cast<double>(points - 1);
            const auto sd = provider.spectral(xi);
            rows_.push_back(sd.lambdas);
        }
    }

    double lambda(std::size_t k, double xi) const {
        const double t = std::clamp((xi - lo_) / (hi_ - lo_), 0.0, 1.0) * static_cast<double>(rows_.size() - 1);
        const std::size_t j = std::min(static_cast<std::size_t>(t), rows_.size() - 2);
        const double w = t - static_cast<double>(j);
        return (1.0 - w) * rows_[j].at(k - 1) + w * rows_[j + 1].at(k - 1);
    }

    std::size_t size() const noexcept { return rows_.size(); }

private:
    double lo_ = 0.0, hi_ = 1.0;
    std::vector<std::vector<double>> rows_;
};

struct H2Cell {
    double eps;
    double xi;
    std::vector<double> lambdas;
    double gap;
    /// max over k <= 4 of sum_j <d_xi psi_k, phi_j>^2.
    double normalization_sum;
};

struct H2Report {
    std::vector<H2Cell> cells;
    double min_gap = 0.0;
    /// Largest C with lambda_k <= -C k^2 for k = 2..k_max over all cells.
    double fitted_C = 0.0;
    double max_normalization_sum = 0.0;
    /// Per eps: sup over xi of lambda_1 and lambda_2.
    std::vector<double> Lambda1;
    std::vector<double> Lambda2;
};

namespace detail {

inline void align(SpectralData& sd, const SpectralData& ref) {
    for (std::size_t k = 0; k < std::min(sd.k_max, ref.k_max); ++k) {
        if (inner_product(sd.psis[k], ref.psis[k]) < 0.0) {
            sd.psis[k] *= -1.0;
            sd.phis[k] *= -1.0;
        }
    }
}

}  // namespace detail

/// Centered difference in xi of the adjoint eigenfunctions with overlap-matched signs.
inline std::vector<Field> dxi_psis(const SpectralProvider& provider, double xi, const SpectralData& ref) {
    const double h = 1e-6 * provider.grid().ell();
    SpectralData p = provider.spectral(xi + h);
    SpectralData m = provider.spectral(xi - h);
    detail::align(p, ref);
    detail::align(m, ref);
    std::vector<Field> out;
    for (std::size_t k = 0; k < ref.k_max; ++k) out.push_back((1.0 / (2.0 * h)) * (p.psis[k] - m.psis[k]));
    return out;
}

inline H2Report validate_H2(const std::vector<double>& eps_list, const std::vector<double>& xi_list,
                            const FluxFunction& flux, const Grid& grid, std::size_t k_max = 8) {
    H2Report rep;
    rep.min_gap = std::numeric_limits<double>::infinity();
    rep.fitted_C = std::numeric_limits<double>::infinity();
    for (double eps : eps_list) {
        SpectralProvider provider(eps, flux, grid, k_max);
        double l1 = -std::numeric_limits<double>::infinity(), l2 = l1;
        for (double xi : xi_list) {
            const SpectralData sd = provider.spectral(xi);
            const auto dpsi = dxi_psis(provider, xi, sd);
            double nsum = 0.0;
            for (std::size_t k = 0; k < std::min<std::size_t>(4, sd.k_max); ++k) {
                double s = 0.0;
                for (std::size_t j = 0; j < sd.k_max; ++j) {
                    const double c = inner_product(dpsi[k], sd.phis[j]);
                    s += c * c;
                }
                nsum = std::max(nsum, s);
            }
            const double gap = sd.lambdas[0] - sd.lambdas[1];
            for (std::size_t k = 2; k <= sd.k_max; ++k)
                rep.fitted_C = std::min(rep.fitted_C, -sd.lambdas[k - 1] / static_cast<double>(k * k));
            rep.min_gap = std::min(rep.min_gap, gap);
            rep.max_normalization_sum = std::max(rep.max_normalization_sum, nsum);
            l1 = std::max(l1, sd.lambdas[0]);
            l2 = std::max(l2, sd.lambdas[1]);
            rep.cells.push_back({eps, xi, sd.lambdas, gap, nsum});
        }
        rep.Lambda1.push_back(l1);
        rep.Lambda2.push_back(l2);
    }
    return rep;
}

}  // namespace slowmotion
