#pragma once

#include <cmath>
#include <utility>

#include "domain.hpp"
#include "mgf.hpp"

namespace hestonlaw {

struct WingReport {
    double beta_R = 0.0;
    double beta_L = 0.0;
    double u_star_plus = kInf;
    double u_star_minus = -kInf;
    double omega = 0.0;
};

// Smaller root of 1/(2 beta) + beta/8 - 1/2 = p, written without cancellation:
// beta = 2 + 4p - 2 sqrt((1+2p)^2 - 1) = 2 / (1 + 2p + 2 sqrt(p (1 + p))).
// An infinite moment index gives beta = 0.
inline double lee_beta(double p_moment) {
    if (!(p_moment > 0)) throw DomainError("lee_beta requires a positive moment index");
    if (std::isinf(p_moment)) return 0.0;
    return 2.0 / (1.0 + 2.0 * p_moment + 2.0 * std::sqrt(p_moment * (1.0 + p_moment)));
}

inline WingReport wing_report(const EvalContext& ctx) {
    const auto c = ctx.canonical();
    const auto dom = abscissae(c);
    WingReport w;
    w.u_star_plus = dom.u_star_plus;
    w.u_star_minus = dom.u_star_minus;
    w.beta_R = lee_beta(dom.u_star_plus - 1.0);
    w.beta_L = lee_beta(-dom.u_star_minus);
    w.omega = c.params.a / c.params.c;
    return w;
}

// u_+- written through omega = a / c only.
inline std::pair<double, double> u_pm_effective(double omega, double rho) {
    if (!(omega > 0) || !std::isfinite(omega)) throw DomainError("u_pm_effective requires omega > 0");
    if (!(std::abs(rho) < 1)) throw DomainError("u_pm_effective requires |rho| < 1");
    // roots of -(1 - rho^2) u^2 + (1 - 2 omega rho) u + omega^2 = 0
    const double qa = -(1.0 - rho * rho);
    const double qb = 1.0 - 2.0 * omega * rho;
    const double qc = omega * omega;
    const double disc = qb * qb - 4.0 * qa * qc;  // = 4 omega^2 + 1 - 4 omega rho
    const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
    const double r1 = q / qa;
    const double r2 = qc / q;
    return {std::min(r1, r2), std::max(r1, r2)};
}

// E[S_t^n] = e^{n mu t} M(n) inside the open domain, +inf otherwise
// (the boundary itself counts as infinite).
inline double spot_moment(const MgfEvaluator& mgf_eval, double n) {
    const auto& m = mgf_eval.context().params;
    if (n == 0.0) return 1.0;
    if (!mgf_eval.inside(n)) return kInf;
    return std::exp(n * m.mu * mgf_eval.context().t() + mgf_eval.log_value(n));
}

inline double spot_moment(const EvalContext& ctx, double n) { return spot_moment(MgfEvaluator(ctx), n); }

inline double performance_note_price(const EvalContext& ctx, double notional, double df) {
    if (!(df > 0 && df <= 1)) throw ValidationError("df", "discount factor must lie in (0, 1]");
    if (!std::isfinite(notional)) throw ValidationError("notional", "must be finite");
    const MgfEvaluator ev(ctx);
    const double m2 = spot_moment(ev, 2.0);
    if (std::isinf(m2)) return kInf;
    return df * notional * (m2 / ctx.params.s0 - spot_moment(ev, 1.0));
}

// Fair strike of an in-arrears FRA on a Heston-distributed rate L:
// L0 + delta Var(L) / (1 + delta L0).
inline double inarrears_fair_strike(const EvalContext& ctx, double delta) {
    if (!(delta > 0) || !std::isfinite(delta)) throw ValidationError("delta", "year fraction must be > 0");
    const MgfEvaluator ev(ctx);
    const double m2 = spot_moment(ev, 2.0);
    if (std::isinf(m2)) return kInf;
    const double l0 = spot_moment(ev, 1.0);
    const double var = std::max(0.0, m2 - l0 * l0);
    return l0 + delta * var / (1.0 + delta * l0);
}

} // namespace hestonlaw
