#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <type_traits>

#include "errors.hpp"

namespace hestonlaw {

struct SeriesTolerance {
    double eps = 1e-16;
    int max_terms = 200;
};

inline void validate(const SeriesTolerance& tol) {
    if (!(tol.eps > 0) || !(tol.eps < 1)) throw ValidationError("tol", "eps must lie in (0, 1)");
    if (tol.max_terms < 64) throw ValidationError("tol", "max_terms must be >= 64");
}

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class R>
struct is_complex<std::complex<R>> : std::true_type {};

// Shared power series sum_{n>=0} z^n / (2n + offset)!, offset in {0, 1}.
template <class T>
T even_factorial_series(T z, int offset, const SeriesTolerance& tol) {
    T term = T(1);
    T sum = term;
    for (int n = 1; n < tol.max_terms; ++n) {
        const double k = 2.0 * n + offset;
        term *= z / ((k - 1.0) * k);
        sum += term;
        if (std::abs(term) <= tol.eps * std::abs(sum)) break;
    }
    return sum;
}

} // namespace detail

// L1(z) = sum z^n / (2n)!  = cosh(sqrt z), independent of the branch of sqrt.
template <class T>
T L1(T z, const SeriesTolerance& tol = {}) {
    if (std::abs(z) <= 1.0) return detail::even_factorial_series(z, 0, tol);
    if constexpr (detail::is_complex<T>::value) {
        return std::cosh(std::sqrt(z));
    } else {
        return z > 0 ? std::cosh(std::sqrt(z)) : std::cos(std::sqrt(-z));
    }
}

// L2(z) = sum z^n / (2n+1)!  = sinh(sqrt z) / sqrt z.
template <class T>
T L2(T z, const SeriesTolerance& tol = {}) {
    if (std::abs(z) <= 1.0) return detail::even_factorial_series(z, 1, tol);
    if constexpr (detail::is_complex<T>::value) {
        const T s = std::sqrt(z);
        return std::sinh(s) / s;
    } else {
        if (z > 0) {
            const double s = std::sqrt(z);
            return std::sinh(s) / s;
        }
        const double s = std::sqrt(-z);
        return std::sin(s) / s;
    }
}

namespace detail {

// Lanczos approximation, g = 7, n = 9 (the widely published coefficient set;
// relative error around 1e-15 for positive arguments).
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline double lanczos_sum(double z) {
    double s = kLanczosCoef[0];
    for (int i = 1; i < 9; ++i) s += kLanczosCoef[i] / (z + i);
    return s;
}

inline bool is_nonpositive_integer(double x) { return x <= 0 && x == std::floor(x); }

} // namespace detail

inline double gamma_fn(double x) {
    if (std::isnan(x)) throw DomainError("gamma_fn: NaN argument");
    if (detail::is_nonpositive_integer(x)) throw DomainError("gamma_fn: pole at nonpositive integer");
    if (x < 0.5) {
        // reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
    }
    if (x > 171.7) return std::numeric_limits<double>::infinity();
    const double z = x - 1.0;
    const double tt = z + detail::kLanczosG + 0.5;
    // split the power so t^(z+0.5) does not overflow before e^{-t} compensates
    const double half = std::pow(tt, 0.5 * (z + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * detail::lanczos_sum(z) * (half * std::exp(-tt)) * half;
}

// log Gamma(x) for x > 0, same Lanczos set.
inline double log_gamma(double x) {
    if (!(x > 0)) throw DomainError("log_gamma: argument must be > 0");
    if (x < 0.5) return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
    const double z = x - 1.0;
    const double tt = z + detail::kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(tt) - tt +
           std::log(detail::lanczos_sum(z));
}

namespace detail {

// log I_nu(x) by the ascending series; every term is positive, so the only
// concern is overflow, handled by periodic rescaling.
inline double log_bessel_i_series(double nu, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    double log_scale = 0.0;
    for (int k = 0; k < 100000; ++k) {
        term *= q / ((k + 1.0) * (nu + k + 1.0));
        sum += term;
        if (term <= 1e-17 * sum && (k + 1.0) * (nu + k + 1.0) > q) break;
        if (sum > 1e250) {
            sum *= 1e-250;
            term *= 1e-250;
            log_scale += 250.0 * std::numbers::ln10;
        }
    }
    return nu * std::log(0.5 * x) - log_gamma(nu + 1.0) + log_scale + std::log(sum);
}

// log I_nu(x) from the large-argument expansion
//   I_nu(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(nu) / x^k.
// `converged` is cleared when the terms stop decreasing before reaching 1e-17.
inline double log_bessel_i_asymptotic(double nu, double x, bool& converged) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    converged = false;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(next) > std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) {
            converged = true;
            break;
        }
    }
    return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

inline bool bessel_use_asymptotic(double nu, double x) { return x >= 30.0 && x >= nu * nu; }

} // namespace detail

// log I_nu(x), nu > -1, x >= 0. Returns +inf at x = 0 for -1 < nu < 0.
inline double log_bessel_i(double nu, double x) {
    if (!(nu > -1.0)) throw DomainError("bessel_i: order must be > -1");
    if (!(x >= 0.0)) throw DomainError("bessel_i: argument must be >= 0");
    if (x == 0.0) {
        if (nu == 0.0) return 0.0;
        return nu > 0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    }
    if (detail::bessel_use_asymptotic(nu, x)) {
        bool ok = false;
        const double v = detail::log_bessel_i_asymptotic(nu, x, ok);
        if (ok) return v;
    }
    return detail::log_bessel_i_series(nu, x);
}

// I_nu(x); saturates to +inf on overflow.
inline double bessel_i(double nu, double x) { return std::exp(log_bessel_i(nu, x)); }

// e^{-x} I_nu(x), finite for all x.
inline double bessel_i_scaled(double nu, double x) { return std::exp(log_bessel_i(nu, x) - x); }

} // namespace hestonlaw
