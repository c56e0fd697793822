#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slowmotion/error.hpp"

namespace slowmotion {

/// Uniform mesh on [0, ell] with n interior nodes and two boundary nodes.
class Grid {
public:
    Grid(double ell, std::size_t n) : ell_(ell), n_(n) {
        if (!(ell > 0.0) || !std::isfinite(ell)) fail(ErrorKind::DomainViolation, "grid length must be positive");
        if (n < 3) fail(ErrorKind::DomainViolation, "grid needs at least 3 interior nodes");
        dx_ = ell / static_cast<double>(n + 1);
    }

    double ell() const noexcept { return ell_; }
    std::size_t interior() const noexcept { return n_; }
    std::size_t size() const noexcept { return n_ + 2; }
    double dx() const noexcept { return dx_; }

    /// Node coordinate; the last node is pinned to ell so that the endpoint is exact.
    double x(std::size_t i) const noexcept {
        return i == n_ + 1 ? ell_ : static_cast<double>(i) * dx_;
    }

    std::vector<double> nodes() const {
        std::vector<double> xs(size());
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = x(i);
        return xs;
    }

    bool operator==(const Grid& o) const noexcept { return ell_ == o.ell_ && n_ == o.n_; }

private:
    double ell_;
    std::size_t n_;
    double dx_;
};

/// Nodal values on a grid, boundary nodes included.
class Field {
public:
    explicit Field(const Grid& g) : grid_(g), v_(g.size(), 0.0) {}
    Field(const Grid& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
        if (v_.size() != grid_.size()) fail(ErrorKind::GridMismatch, "field length does not match grid");
    }

    template <class F>
    static Field sample(const Grid& g, F&& fn) {
        Field out(g);
        for (std::size_t i = 0; i < g.size(); ++i) out.v_[i] = fn(g.x(i));
        return out;
    }

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return v_.size(); }
    std::span<const double> values() const noexcept { return v_; }
    std::span<double> values() noexcept { return v_; }
    const std::vector<double>& data() const noexcept { return v_; }

    double operator[](std::size_t i) const noexcept { return v_[i]; }
    double& operator[](std::size_t i) noexcept { return v_[i]; }

    bool satisfies_dirichlet(double tol = 0.0) const noexcept {
        return std::abs(v_.front()) <= tol && std::abs(v_.back()) <= tol;
    }

    void clamp_dirichlet() noexcept {
        v_.front() = 0.0;
        v_.back() = 0.0;
    }

    Field& operator+=(const Field& o) {
        check_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        check_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    Field& operator*=(double s) noexcept {
        for (double& x : v_) x *= s;
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(double s, Field a) { return a *= s; }
    friend Field operator-(Field a) { return a *= -1.0; }

    void check_same(const Field& o) const {
        if (!(grid_ == o.grid_)) fail(ErrorKind::GridMismatch, "fields live on different grids");
    }

private:
    Grid grid_;
    std::vector<double> v_;
};

/// Reflection u(x) -> sign * u(ell - x), exact on the node lattice.
inline Field reflect(const Field& u, double sign = -1.0) {
    Field out(u.grid());
    const std::size_t m = u.size() - 1;
    for (std::size_t i = 0; i <= m; ++i) out[i] = sign * u[m - i];
    return out;
}

/// Convex flux with f(0) = f'(0) = 0 and odd derivative.
///
/// Burgers is u^2/2; the power family is |u|^gamma/gamma with gamma >= 2.
class FluxFunction {
public:
    enum class Kind { burgers, power };

    FluxFunction(Kind kind, double gamma, std::string name)
        : kind_(kind), gamma_(gamma), name_(std::move(name)) {
        validate();
    }

    double f(double u) const noexcept {
        if (kind_ == Kind::burgers) return 0.5 * u * u;
        return std::pow(std::abs(u), gamma_) / gamma_;
    }
    double df(double u) const noexcept {
        if (kind_ == Kind::burgers) return u;
        return std::copysign(std::pow(std::abs(u), gamma_ - 1.0), u);
    }
    double d2f(double u) const noexcept {
        if (kind_ == Kind::burgers) return 1.0;
        if (gamma_ == 2.0) return 1.0;
        return (gamma_ - 1.0) * std::pow(std::abs(u), gamma_ - 2.0);
    }
    /// Third derivative; reported as 0 at u = 0 where it may be singular.
    double d3f(double u) const noexcept {
        if (kind_ == Kind::burgers || gamma_ == 2.0 || u == 0.0) return 0.0;
        return std::copysign((gamma_ - 1.0) * (gamma_ - 2.0) * std::pow(std::abs(u), gamma_ - 3.0), u);
    }

    double eval_f(double u) const noexcept { return f(u); }
    double eval_df(double u) const noexcept { return df(u); }
    double eval_d2f(double u) const noexcept { return d2f(u); }
    double eval_d3f(double u) const noexcept { return d3f(u); }

    Kind kind() const noexcept { return kind_; }
    double gamma() const noexcept { return gamma_; }
    const std::string& name() const noexcept { return name_; }

    /// Checks the structural hypotheses on sampled points of [-range, range].
    void validate(double range = 4.0) const {
        if (std::abs(f(0.0)) > 1e-12 || std::abs(df(0.0)) > 1e-12)
            fail(ErrorKind::InvalidFlux, name_ + ": f(0) and f'(0) must vanish");
        constexpr int samples = 64;
        for (int s = 1; s <= samples; ++s) {
            const double u = range * static_cast<double>(s) / samples;
            if (std::abs(df(-u) + df(u)) > 1e-10 * std::max(1.0, std::abs(df(u))))
                fail(ErrorKind::InvalidFlux, name_ + ": f' is not odd");
            if (!(d2f(u) > 0.0) || !(d2f(-u) > 0.0))
                fail(ErrorKind::InvalidFlux, name_ + ": f'' must be positive away from 0");
        }
    }

private:
    Kind kind_;
    double gamma_;
    std::string name_;
};

inline FluxFunction burgers_flux() { return FluxFunction(FluxFunction::Kind::burgers, 2.0, "burgers"); }

inline FluxFunction power_flux(double gamma) {
    if (!(gamma >= 2.0) || !std::isfinite(gamma))
        fail(ErrorKind::InvalidFlux, "power flux requires gamma >= 2");
    if (gamma == 2.0) return burgers_flux();
    return FluxFunction(FluxFunction::Kind::power, gamma, "power");
}

/// Trapezoid approximation of the L2(0, ell) pairing.
inline double inner_product(const Field& a, const Field& b) {
    a.check_same(b);
    const std::size_t m = a.size() - 1;
    double s = 0.5 * (a[0] * b[0] + a[m] * b[m]);
    for (std::size_t i = 1; i < m; ++i) s += a[i] * b[i];
    return s * a.grid().dx();
}

inline double norm_l2(const Field& a) { return std::sqrt(inner_product(a, a)); }

inline double norm_l1(const Field& a) {
    const std::size_t m = a.size() - 1;
    double s = 0.5 * (std::abs(a[0]) + std::abs(a[m]));
    for (std::size_t i = 1; i < m; ++i) s += std::abs(a[i]);
    return s * a.grid().dx();
}

inline double norm_sup(const Field& a) {
    double s = 0.0;
    for (double v : a.values()) s = std::max(s, std::abs(v));
    return s;
}

/// H1 norm with the derivative taken cellwise by forward differences.
inline double norm_h1(const Field& a) {
    const double dx = a.grid().dx();
    double d = 0.0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        const double g = (a[i + 1] - a[i]) / dx;
        d += g * g;
    }
    return std::sqrt(inner_product(a, a) + d * dx);
}

/// eps u'' - (f(u))' + f'(u) at interior nodes; zero at the boundary.
inline Field stationary_residual(const Field& u, double eps, const FluxFunction& flux) {
    const Grid& g = u.grid();
    const double dx = g.dx();
    const double c2 = eps / (dx * dx);
    const double c1 = 1.0 / (2.0 * dx);
    Field r(g);
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        r[i] = c2 * (u[i + 1] - 2.0 * u[i] + u[i - 1]) - c1 * (flux.f(u[i + 1]) - flux.f(u[i - 1])) +
               flux.df(u[i]);
    }
    return r;
}

/// Interior zero crossings located by linear interpolation.
inline std::vector<double> zero_crossings(const Field& u) {
    std::vector<double> out;
    const Grid& g = u.grid();
    const std::size_t m = u.size() - 1;
    for (std::size_t i = 1; i < m; ++i) {
        if (u[i] == 0.0) {
            if (u[i - 1] * u[i + 1] < 0.0) out.push_back(g.x(i));
            continue;
        }
        if (i + 1 < m && u[i] * u[i + 1] < 0.0)
            out.push_back(g.x(i) - u[i] * (g.x(i + 1) - g.x(i)) / (u[i + 1] - u[i]));
    }
    return out;
}

}  // namespace slowmotion
