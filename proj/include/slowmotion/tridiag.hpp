#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slowmotion/error.hpp"

namespace slowmotion {

/// Square tridiagonal matrix. lower[i] = A(i+1, i), upper[i] = A(i, i+1).
struct Tridiagonal {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    Tridiagonal() = default;
    explicit Tridiagonal(std::size_t n) : lower(n ? n - 1 : 0), diag(n), upper(n ? n - 1 : 0) {}

    std::size_t size() const noexcept { return diag.size(); }

    std::vector<double> apply(std::span<const double> x) const {
        const std::size_t n = size();
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += lower[i - 1] * x[i - 1];
            if (i + 1 < n) s += upper[i] * x[i + 1];
            y[i] = s;
        }
        return y;
    }

    Tridiagonal transposed() const {
        Tridiagonal t;
        t.diag = diag;
        t.lower = upper;
        t.upper = lower;
        return t;
    }
};

/// Thomas algorithm; intended for diagonally dominant systems, no pivoting.
inline void thomas_solve(const Tridiagonal& a, std::span<double> rhs, std::vector<double>& scratch) {
    const std::size_t n = a.size();
    if (rhs.size() != n) fail(ErrorKind::GridMismatch, "tridiagonal solve: size mismatch");
    scratch.resize(n);
    double beta = a.diag[0];
    rhs[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i] = a.upper[i - 1] / beta;
        beta = a.diag[i] - a.lower[i - 1] * scratch[i];
        rhs[i] = (rhs[i] - a.lower[i - 1] * rhs[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

inline std::vector<double> thomas_solve(const Tridiagonal& a, std::vector<double> rhs) {
    std::vector<double> scratch;
    thomas_solve(a, rhs, scratch);
    return rhs;
}

/// Twisted (two-sided) factorization: eliminates from both ends toward the middle row.
///
/// For a persymmetric matrix the operation sequence is mirror-symmetric, so an antisymmetric
/// right-hand side yields an exactly antisymmetric solution in floating point.
class TwistedFactorization {
public:
    TwistedFactorization() = default;
    explicit TwistedFactorization(const Tridiagonal& a) : a_(a) {
        const std::size_t n = a.size();
        if (n < 2) fail(ErrorKind::DomainViolation, "twisted factorization needs n >= 2");
        k_ = n / 2;
        cp_.assign(n, 0.0);
        ep_.assign(n, 0.0);
        piv_.assign(n, 0.0);
        // Top rows 0..k-1 eliminated downward.
        for (std::size_t i = 0; i < k_; ++i) {
            piv_[i] = i == 0 ? a.diag[0] : a.diag[i] - a.lower[i - 1] * cp_[i - 1];
            cp_[i] = a.upper[i] / piv_[i];
        }
        // Bottom rows eliminated upward down to k+1 (odd n) or k (even n).
        const std::size_t stop = n % 2 == 1 ? k_ + 1 : k_;
        for (std::size_t i = n; i-- > stop;) {
            piv_[i] = i == n - 1 ? a.diag[i] : a.diag[i] - a.upper[i] * ep_[i + 1];
            ep_[i] = a.lower[i - 1] / piv_[i];
        }
        if (n % 2 == 1) {
            piv_[k_] = a.diag[k_] - a.lower[k_ - 1] * cp_[k_ - 1] - a.upper[k_] * ep_[k_ + 1];
        } else {
            mid_ = 1.0 - cp_[k_ - 1] * ep_[k_];
        }
    }

    std::size_t size() const noexcept { return a_.size(); }

    void solve(std::span<double> r) const {
        const std::size_t n = a_.size();
        if (r.size() != n) fail(ErrorKind::GridMismatch, "tridiagonal solve: size mismatch");
        for (std::size_t i = 0; i < k_; ++i) r[i] = (i == 0 ? r[0] : r[i] - a_.lower[i - 1] * r[i - 1]) / piv_[i];
        const std::size_t stop = n % 2 == 1 ? k_ + 1 : k_;
        for (std::size_t i = n; i-- > stop;) r[i] = (i == n - 1 ? r[i] : r[i] - a_.upper[i] * r[i + 1]) / piv_[i];
        if (n % 2 == 1) {
            r[k_] = (r[k_] - a_.lower[k_ - 1] * r[k_ - 1] - a_.upper[k_] * r[k_ + 1]) / piv_[k_];
            for (std::size_t i = k_; i-- > 0;) r[i] -= cp_[i] * r[i + 1];
            for (std::size_t i = k_ + 1; i < n; ++i) r[i] -= ep_[i] * r[i - 1];
        } else {
            const double lo = r[k_ - 1], hi = r[k_];
            r[k_ - 1] = (lo - cp_[k_ - 1] * hi) / mid_;
            r[k_] = (hi - ep_[k_] * lo) / mid_;
            for (std::size_t i = k_ - 1; i-- > 0;) r[i] -= cp_[i] * r[i + 1];
            for (std::size_t i = k_ + 1; i < n; ++i) r[i] -= ep_[i] * r[i - 1];
        }
    }

private:
    Tridiagonal a_;
    std::size_t k_ = 0;
    std::vector<double> cp_, ep_, piv_;
    double mid_ = 1.0;
};

}  // namespace slowmotion
