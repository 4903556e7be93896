#pragma once

// Special functions behind the interference formulas: the Gauss
// hypergeometric function on the negative real axis, the interference
// kernel Z(k, delta, theta), generalized binomial coefficients and the
// regularized incomplete beta function.
//
// Everything is templated on the real scalar type and header-only.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "sirmeta/errors.hpp"

namespace sirmeta {

template <typename Real>
using ComplexT = std::complex<Real>;
using Complex = ComplexT<double>;

namespace specfun {

inline constexpr int kSeriesMaxTerms = 500;
inline constexpr double kSeriesRelTol = 1e-12;
// Pfaff is applied below this argument; the connection formula below kConnectionBelow.
inline constexpr double kPfaffBelow = -0.5;
inline constexpr double kConnectionBelow = -2.0;

template <typename Real>
bool is_nonpositive_integer(Real x) {
    return x <= Real(0) && std::floor(x) == x;
}

template <typename Real>
bool is_integer(Real x) {
    return std::floor(x) == x;
}

// Sign of Gamma(x) for x not a pole.
template <typename Real>
int gamma_sign(Real x) {
    if (x > Real(0)) return 1;
    return (static_cast<long long>(std::floor(x)) % 2 == 0) ? 1 : -1;
}

/// Plain Gauss series sum_n (a)_n (b)_n / ((c)_n n!) z^n. Convergent for |z| < 1.
template <typename Real>
Real hyp2f1_series(Real a, Real b, Real c, Real z) {
    Real term = 1;
    Real sum = 1;
    for (int n = 0; n < kSeriesMaxTerms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * Real(n + 1)) * z;
        sum += term;
        if (std::abs(term) <= Real(kSeriesRelTol) * std::abs(sum)) return sum;
    }
    throw ConvergenceError("hyp2f1: series did not converge within " +
                           std::to_string(kSeriesMaxTerms) + " terms (z=" +
                           std::to_string(static_cast<double>(z)) + ")");
}

// Gamma(p) Gamma(q) / (Gamma(r) Gamma(s)) in log space. Poles in the
// denominator give 0; p and q must not be poles.
template <typename Real>
Real gamma_ratio(Real p, Real q, Real r, Real s) {
    if (is_nonpositive_integer(r) || is_nonpositive_integer(s)) return Real(0);
    const Real log_mag = std::lgamma(p) + std::lgamma(q) - std::lgamma(r) - std::lgamma(s);
    const int sign = gamma_sign(p) * gamma_sign(q) * gamma_sign(r) * gamma_sign(s);
    return Real(sign) * std::exp(log_mag);
}

/// Gauss hypergeometric 2F1(a, b; c; z) for real z <= 0.
///
/// |z| <= 1/2 sums the series directly. On [-2, -1/2) the Pfaff transform
/// maps the argument into [1/3, 2/3]. Below -2 the 1/(1-z) connection
/// formula is used (argument in (0, 1/3)) unless b - a is an integer, in
/// which case Pfaff is used and may exhaust the term cap.
template <typename Real>
Real hyp2f1(Real a, Real b, Real c, Real z) {
    if (is_nonpositive_integer(c)) {
        throw DomainError("hyp2f1: c must not be a nonpositive integer");
    }
    if (!(z <= Real(0))) {
        throw DomainError("hyp2f1: only z <= 0 is supported");
    }
    if (z == Real(0)) return Real(1);
    if (z >= Real(kPfaffBelow)) return hyp2f1_series(a, b, c, z);

    if (z < Real(kConnectionBelow) && !is_integer(b - a)) {
        const Real w = Real(1) / (Real(1) - z);
        Real result = 0;
        const Real ca = gamma_ratio(c, b - a, b, c - a);
        if (ca != Real(0)) {
            result += ca * std::pow(Real(1) - z, -a) * hyp2f1_series(a, c - b, a - b + 1, w);
        }
        const Real cb = gamma_ratio(c, a - b, a, c - b);
        if (cb != Real(0)) {
            result += cb * std::pow(Real(1) - z, -b) * hyp2f1_series(b, c - a, b - a + 1, w);
        }
        return result;
    }
    return std::pow(Real(1) - z, -a) * hyp2f1_series(a, c - b, c, z / (z - Real(1)));
}

/// Arguments of the interference kernel.
template <typename Real>
struct KernelArgsT {
    int k = 1;           // series index, >= 1
    Real delta = 0.5;    // 2 / alpha, in (0, 1)
    Real theta = 1;      // linear SIR threshold, >= 0

    void validate() const {
        if (k < 1) throw DomainError("z_kernel: k must be >= 1");
        if (!(delta > Real(0) && delta < Real(1))) {
            throw DomainError("z_kernel: delta must lie in (0, 1)");
        }
        if (!(theta >= Real(0)) || !std::isfinite(theta)) {
            throw DomainError("z_kernel: theta must be finite and >= 0");
        }
    }
};
using KernelArgs = KernelArgsT<double>;

/// Z(k, delta, theta) = (-1)^{k+1} theta^k / (k - delta) 2F1(k, k - delta; k - delta + 1; -theta).
///
/// The hypergeometric factor is positive here, so the magnitude is
/// assembled in log space to keep theta^k from overflowing.
template <typename Real>
Real z_kernel(const KernelArgsT<Real>& args) {
    args.validate();
    if (args.theta == Real(0)) return Real(0);
    const Real k = Real(args.k);
    const Real kd = k - args.delta;
    const Real f = hyp2f1(k, kd, kd + Real(1), -args.theta);
    const Real magnitude = std::exp(k * std::log(args.theta) + std::log(f) - std::log(kd));
    return (args.k % 2 == 1) ? magnitude : -magnitude;
}

template <typename Real>
Real z_kernel(int k, Real delta, Real theta) {
    return z_kernel(KernelArgsT<Real>{k, delta, theta});
}

/// Generalized binomial coefficient z (z-1) ... (z-k+1) / k!.
template <typename Real>
ComplexT<Real> complex_binom(ComplexT<Real> z, unsigned k) {
    ComplexT<Real> out(1, 0);
    for (unsigned i = 0; i < k; ++i) {
        out *= (z - Real(i)) / Real(i + 1);
    }
    return out;
}

// Continued fraction for the incomplete beta function (modified Lentz).
template <typename Real>
Real incomplete_beta_cf(Real a, Real b, Real x) {
    constexpr Real tiny = std::numeric_limits<Real>::min() / std::numeric_limits<Real>::epsilon();
    constexpr Real eps = std::numeric_limits<Real>::epsilon();
    const Real qab = a + b;
    const Real qap = a + 1;
    const Real qam = a - 1;
    Real c = 1;
    Real d = 1 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1 / d;
    Real h = d;
    for (int m = 1; m <= 10000; ++m) {
        const Real m2 = Real(2 * m);
        Real aa = Real(m) * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        const Real del = d * c;
        h *= del;
        if (std::abs(del - 1) <= Real(4) * eps) return h;
    }
    throw ConvergenceError("incomplete beta continued fraction did not converge");
}

template <typename Real>
Real log_beta(Real a, Real b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

/// Regularized incomplete beta I_x(a, b), i.e. the Beta(a, b) CDF at x.
template <typename Real>
Real ibeta(Real a, Real b, Real x) {
    if (!(a > 0 && b > 0)) throw DomainError("ibeta: shape parameters must be positive");
    if (x <= Real(0)) return Real(0);
    if (x >= Real(1)) return Real(1);
    const Real front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
    if (x < (a + 1) / (a + b + 2)) {
        return front * incomplete_beta_cf(a, b, x) / a;
    }
    return Real(1) - front * incomplete_beta_cf(b, a, Real(1) - x) / b;
}

} // namespace specfun
} // namespace sirmeta
