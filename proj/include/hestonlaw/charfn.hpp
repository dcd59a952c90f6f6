#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"
#include "params.hpp"
#include "special.hpp"

namespace hestonlaw {

using cplx = std::complex<double>;

struct EvalContext {
    ModelParams params;
    Horizon horizon;
    SeriesTolerance tol;

    EvalContext(const ModelParams& p, const Horizon& h, const SeriesTolerance& s = {})
        : params(p), horizon(h), tol(s) {
        validate(params);
        validate(horizon);
        validate(tol);
    }

    double t() const { return horizon.t; }

    // Copy with c > 0. Domain computations assume this; the analytic formulas
    // below do not care because they only see c^2 and c*rho.
    EvalContext canonical() const {
        EvalContext out = *this;
        out.params = canonicalize(params);
        return out;
    }
};

// p(u) = (a - rho c u)^2 + c^2 (u - u^2)
template <class T>
T p_quadratic(const EvalContext& ctx, T u) {
    const auto& m = ctx.params;
    const T k = m.a - m.rho * m.c * u;
    return k * k + m.c * m.c * (u - u * u);
}

template <class T>
T p_prime(const EvalContext& ctx, T u) {
    const auto& m = ctx.params;
    return -2.0 * m.rho * m.c * (m.a - m.rho * m.c * u) + m.c * m.c * (1.0 - 2.0 * u);
}

// a - c rho u
template <class T>
T kappa_term(const EvalContext& ctx, T u) {
    return ctx.params.a - ctx.params.c * ctx.params.rho * u;
}

namespace detail {

// Pieces of F(u) = L1(p t^2/4) + (a - c rho u)(t/2) L2(p t^2/4) needed by every
// evaluator: the value, its logarithm and ratio = (t/2) L2 / F, which turns
// into G after multiplying by (1 - u). Once Re(sqrt(p)) t/2 exceeds 10 the
// hyperbolic functions are factored as e^{P t/2} times a bounded remainder.
template <class T>
struct FParts {
    T f;
    T log_f;  // real: NaN when F <= 0; complex: principal branch
    T ratio;
    bool scaled;
};

inline constexpr double kScaledSwitch = 10.0;

inline FParts<double> f_parts(const EvalContext& ctx, double u) {
    const double t = ctx.t();
    const double p = p_quadratic(ctx, u);
    const double k = kappa_term(ctx, u);
    const double s = 0.25 * p * t * t;
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (s <= kScaledSwitch * kScaledSwitch) {
        const double l2 = L2(s, ctx.tol);
        const double f = L1(s, ctx.tol) + k * 0.5 * t * l2;
        return {f, f > 0 ? std::log(f) : nan, 0.5 * t * l2 / f, false};
    }
    const double big_p = std::sqrt(p);
    const double e = std::exp(-big_p * t);
    const double h = 0.5 * (1.0 + k / big_p) + 0.5 * e * (1.0 - k / big_p);
    const double half = 0.5 * big_p * t;
    const double f = half > 709.0 ? (h > 0 ? kInf : (h < 0 ? -kInf : 0.0)) : std::exp(half) * h;
    const double ratio = (1.0 - e) / (big_p * (1.0 + e) + k * (1.0 - e));
    return {f, h > 0 ? half + std::log(h) : nan, ratio, true};
}

inline FParts<cplx> f_parts(const EvalContext& ctx, cplx z) {
    const double t = ctx.t();
    const cplx p = p_quadratic(ctx, z);
    const cplx k = kappa_term(ctx, z);
    const cplx big_p = std::sqrt(p);
    if (big_p.real() * 0.5 * t <= kScaledSwitch) {
        const cplx s = 0.25 * p * t * t;
        const cplx l2 = L2(s, ctx.tol);
        const cplx f = L1(s, ctx.tol) + k * 0.5 * t * l2;
        return {f, std::log(f), 0.5 * t * l2 / f, false};
    }
    const cplx e = std::exp(-big_p * t);
    const cplx h = 0.5 * (1.0 + k / big_p) + 0.5 * e * (1.0 - k / big_p);
    const cplx ratio = (1.0 - e) / (big_p * (1.0 + e) + k * (1.0 - e));
    const cplx log_f = 0.5 * big_p * t + std::log(h);
    return {std::exp(log_f), log_f, ratio, true};
}

} // namespace detail

// F(u); may saturate to +-inf for huge arguments.
inline double big_f(const EvalContext& ctx, double u) { return detail::f_parts(ctx, u).f; }

inline cplx big_f(const EvalContext& ctx, cplx z) { return detail::f_parts(ctx, z).f; }

// G(u) = (1 - u)(t/2) L2(p t^2/4) / F(u)
inline double big_g(const EvalContext& ctx, double u) {
    const auto parts = detail::f_parts(ctx, u);
    if (std::abs(parts.f) < 1e-13 * (1.0 + std::abs(u)))
        throw PoleError("big_g evaluated at a zero of F", u);
    return (1.0 - u) * parts.ratio;
}

// log M(u) straight from the closed form, without checking that u lies inside
// the domain. Returns NaN where F(u) <= 0.
inline double log_mgf_formula(const EvalContext& ctx, double u) {
    const auto& m = ctx.params;
    const auto parts = detail::f_parts(ctx, u);
    if (std::isnan(parts.log_f)) return parts.log_f;
    const double xi = xi_exponent(m);
    return m.x0 * u + xi * (kappa_term(ctx, u) * 0.5 * ctx.t() - parts.log_f) -
           m.v0 * u * (1.0 - u) * parts.ratio;
}

// Follows a continuous branch of log F(iu) along the real u axis. F(iu) never
// vanishes for real u (all zeros of F are real and nonzero) so the branch is
// well defined; it starts from the real value log F(0) = a t / 2.
class LogFTracker {
public:
    explicit LogFTracker(const EvalContext& ctx) : ctx_(ctx), log_f_(0.5 * ctx.params.a * ctx.t(), 0.0) {}

    // Moves the tracker to u and returns the pieces at i*u with log_f on the
    // tracked branch.
    detail::FParts<cplx> advance(double u) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        if (u == u_) {
            auto parts = detail::f_parts(ctx_, cplx(0.0, u));
            parts.log_f = log_f_;
            return parts;
        }
        for (;;) {
            const double remaining = u - u_;
            const double step = std::abs(remaining) <= h_ ? remaining : std::copysign(h_, remaining);
            const double next = (std::abs(remaining) <= h_) ? u : u_ + step;
            auto parts = detail::f_parts(ctx_, cplx(0.0, next));
            cplx cand = parts.log_f;
            const double wraps = std::round((cand.imag() - log_f_.imag()) / two_pi);
            cand -= cplx(0.0, two_pi * wraps);
            const double jump = std::abs(cand.imag() - log_f_.imag());
            if (jump > 0.25 * std::numbers::pi && std::abs(step) > 1e-9) {
                h_ *= 0.5;
                continue;
            }
            if (jump < 0.05 * std::numbers::pi) h_ = std::min(1.5 * h_, kMaxStep);
            u_ = next;
            log_f_ = cand;
            if (next == u) {
                parts.log_f = cand;
                return parts;
            }
        }
    }

private:
    static constexpr double kMaxStep = 1.0;
    const EvalContext& ctx_;
    double u_ = 0.0;
    cplx log_f_;
    double h_ = 0.25;
};

namespace detail {

inline cplx log_charfn_from_parts(const EvalContext& ctx, double u, const FParts<cplx>& parts) {
    const auto& m = ctx.params;
    const cplx z(0.0, u);
    const double xi = xi_exponent(m);
    return cplx(0.0, m.x0 * u) + xi * (kappa_term(ctx, z) * 0.5 * ctx.t() - parts.log_f) -
           m.v0 * z * (1.0 - z) * parts.ratio;
}

} // namespace detail

// log phi(u) for phi(u) = E[exp(i u X_t)] = Phi(i u), using the L1/L2 form
// with a continuously tracked log F.
inline cplx log_charfn_new(const EvalContext& ctx, double u) {
    LogFTracker tracker(ctx);
    return detail::log_charfn_from_parts(ctx, u, tracker.advance(u));
}

inline cplx charfn_new(const EvalContext& ctx, double u) { return std::exp(log_charfn_new(ctx, u)); }

// Grid version; one tracker walks the points in the given order, which is
// much cheaper than restarting from 0 for every point.
inline std::vector<cplx> log_charfn_new_grid(const EvalContext& ctx, std::span<const double> us) {
    LogFTracker tracker(ctx);
    std::vector<cplx> out;
    out.reserve(us.size());
    for (double u : us) out.push_back(detail::log_charfn_from_parts(ctx, u, tracker.advance(u)));
    return out;
}

inline std::vector<cplx> charfn_new_grid(const EvalContext& ctx, std::span<const double> us) {
    auto out = log_charfn_new_grid(ctx, us);
    for (auto& v : out) v = std::exp(v);
    return out;
}

// "Little trap" form with principal square root and log:
//   d = sqrt(xi^2 + c^2 (i u + u^2)), xi = a - c rho u i, g = (xi - d)/(xi + d).
inline cplx log_charfn_albrecher(const EvalContext& ctx, double u) {
    const auto& m = ctx.params;
    const double t = ctx.t();
    const double c2 = m.c * m.c;
    const cplx iu(0.0, u);
    const cplx xi = m.a - m.c * m.rho * iu;
    const cplx d = std::sqrt(xi * xi + c2 * (iu + u * u));
    const cplx g = (xi - d) / (xi + d);
    const cplx e = std::exp(-d * t);
    const cplx one_minus_ge = 1.0 - g * e;
    return iu * m.x0 + (m.a * m.b / c2) * ((xi - d) * t - 2.0 * std::log(one_minus_ge / (1.0 - g))) +
           (m.v0 / c2) * (xi - d) * (1.0 - e) / one_minus_ge;
}

inline cplx charfn_albrecher(const EvalContext& ctx, double u) { return std::exp(log_charfn_albrecher(ctx, u)); }

// |phi1/phi2 - 1| computed from the logarithms, so it stays meaningful when
// both values underflow.
inline double log_relative_difference(cplx log1, cplx log2) {
    cplx diff = log1 - log2;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    diff.imag(diff.imag() - two_pi * std::round(diff.imag() / two_pi));
    return std::abs(std::expm1(diff.real()) * std::exp(cplx(0.0, diff.imag())) +
                    (std::exp(cplx(0.0, diff.imag())) - 1.0));
}

} // namespace hestonlaw
