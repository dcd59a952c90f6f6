#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "errors.hpp"

namespace hestonlaw {

// Heston parameters for
//   dS = mu S dt + sqrt(V) S dZ,   dV = a (b - V) dt + c sqrt(V) dW,   d<Z,W> = rho dt.
// x0 is kept equal to log(s0); build instances through make_params() so the
// pair stays consistent and c is canonicalized to be positive.
struct ModelParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double rho = 0.0;
    double s0 = 1.0;
    double x0 = 0.0;
    double v0 = 0.0;
    double mu = 0.0;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct Horizon {
    double t = 1.0;

    friend bool operator==(const Horizon&, const Horizon&) = default;
};

inline void validate(const ModelParams& p) {
    auto finite = [](const char* name, double v) {
        if (!std::isfinite(v)) throw ValidationError(name, "must be finite");
    };
    finite("a", p.a);
    finite("b", p.b);
    finite("c", p.c);
    finite("rho", p.rho);
    finite("s0", p.s0);
    finite("v0", p.v0);
    finite("mu", p.mu);
    if (!(p.a > 0)) throw ValidationError("a", "mean-reversion rate must be > 0");
    if (!(p.b > 0)) throw ValidationError("b", "long-term variance must be > 0");
    if (p.c == 0) throw ValidationError("c", "vol-of-vol must be nonzero");
    if (!(p.rho >= -1 && p.rho <= 1)) throw ValidationError("rho", "correlation must lie in [-1, 1]");
    if (!(p.s0 > 0)) throw ValidationError("s0", "initial spot must be > 0");
    if (!(p.v0 >= 0)) throw ValidationError("v0", "initial variance must be >= 0");
    if (std::abs(p.x0 - std::log(p.s0)) > 1e-12 * (1 + std::abs(p.x0)))
        throw ValidationError("x0", "must equal log(s0)");
}

inline void validate(const Horizon& h) {
    if (!(h.t > 0) || !std::isfinite(h.t)) throw ValidationError("t", "horizon must be finite and > 0");
}

// (c, rho) -> (-c, -rho) leaves the law of X_t unchanged.
inline ModelParams canonicalize(ModelParams p) {
    validate(p);
    if (p.c < 0) {
        p.c = -p.c;
        p.rho = -p.rho;
    }
    return p;
}

inline ModelParams make_params(double a, double b, double c, double rho,
                               double s0 = 1.0, double v0 = 0.0, double mu = 0.0) {
    if (!(s0 > 0) || !std::isfinite(s0)) throw ValidationError("s0", "initial spot must be finite and > 0");
    ModelParams p{a, b, c, rho, s0, std::log(s0), v0, mu};
    return canonicalize(p);
}

// Same as make_params but keeps the sign of c; only used to exercise the
// sign-flip symmetry of the formulas.
inline ModelParams make_raw_params(double a, double b, double c, double rho,
                                   double s0 = 1.0, double v0 = 0.0, double mu = 0.0) {
    if (!(s0 > 0) || !std::isfinite(s0)) throw ValidationError("s0", "initial spot must be finite and > 0");
    ModelParams p{a, b, c, rho, s0, std::log(s0), v0, mu};
    validate(p);
    return p;
}

// Measure change with density e^{X_T}: the law of -X under the new measure is
// Heston with (a - c rho, a b / (a - c rho), c, -rho, 1/s0, v0, -mu).
inline ModelParams invert_model(const ModelParams& p) {
    validate(p);
    const double a_new = p.a - p.c * p.rho;
    if (!(a_new > 0))
        throw DomainError("invert_model requires a > c*rho (got a - c*rho = " + std::to_string(a_new) + ")");
    ModelParams q = p;
    q.a = a_new;
    q.b = p.a * p.b / a_new;
    q.rho = -p.rho;
    q.s0 = 1.0 / p.s0;
    q.x0 = -p.x0;
    q.mu = -p.mu;
    return q;
}

// (a, b, c, v0, t) -> (la, lb, lc, l v0, t / l); the law of X_t is invariant.
inline std::pair<ModelParams, Horizon> rescale(const ModelParams& p, const Horizon& h, double lambda) {
    validate(p);
    validate(h);
    if (!(lambda > 0) || !std::isfinite(lambda)) throw DomainError("rescale requires lambda > 0");
    ModelParams q = p;
    q.a *= lambda;
    q.b *= lambda;
    q.c *= lambda;
    q.v0 *= lambda;
    return {q, Horizon{h.t / lambda}};
}

inline double xi_exponent(const ModelParams& p) { return 2.0 * p.a * p.b / (p.c * p.c); }

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace hestonlaw
