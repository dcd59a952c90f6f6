#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "charfn.hpp"
#include "errors.hpp"
#include "params.hpp"

namespace hestonlaw {

enum class CaseLabel { A_gt_rhoc, A_eq_rhoc, A_lt_rhoc_pre_t0, A_lt_rhoc_post_t0, Rho1_c_eq_2a };

inline const char* to_string(CaseLabel c) {
    switch (c) {
    case CaseLabel::A_gt_rhoc: return "A_gt_rhoc";
    case CaseLabel::A_eq_rhoc: return "A_eq_rhoc";
    case CaseLabel::A_lt_rhoc_pre_t0: return "A_lt_rhoc_pre_t0";
    case CaseLabel::A_lt_rhoc_post_t0: return "A_lt_rhoc_post_t0";
    case CaseLabel::Rho1_c_eq_2a: return "Rho1_c_eq_2a";
    }
    return "?";
}

struct DomainReport {
    double u_minus = -kInf;
    double u_plus = kInf;
    std::optional<double> t0;
    double u_star_minus = -kInf;
    double u_star_plus = kInf;
    CaseLabel case_label = CaseLabel::A_gt_rhoc;
};

struct BracketLadder {
    // (alpha_{-n}, alpha_{+n}) for n = 1..N; a missing side is +-inf.
    std::vector<std::pair<double, double>> alpha;
    std::pair<double, double> beta1{-kInf, kInf};
};

namespace detail {

inline constexpr double kBoundaryRelTol = 1e-12;

inline bool is_c_eq_2a_rho1(const ModelParams& m) {
    return m.rho == 1.0 && std::abs(m.c - 2.0 * m.a) <= kBoundaryRelTol * m.a;
}

inline bool is_a_eq_rhoc(const ModelParams& m) {
    return std::abs(m.a - m.c * m.rho) < kBoundaryRelTol * m.a;
}

inline std::string grid_dump(const EvalContext& ctx, double lo, double hi, int n = 21) {
    std::ostringstream os;
    os.precision(17);
    os << "F on [" << lo << ", " << hi << "]:";
    for (int i = 0; i < n; ++i) {
        const double u = lo + (hi - lo) * i / (n - 1);
        os << " (" << u << ", " << big_f(ctx, u) << ")";
    }
    return os.str();
}

// Bisection for a sign change of f with f(pos) > 0 >= f(neg). Halves until
// the bracket is two adjacent doubles and returns the end with the smaller
// |f|, so the result is as sharp as the arithmetic allows.
inline double bisect(const std::function<double(double)>& f, double pos, double neg) {
    for (int i = 0; i < 2200; ++i) {
        const double mid = 0.5 * (pos + neg);
        if (mid == pos || mid == neg) break;
        const double fm = f(mid);
        if (fm == 0) return mid;
        if (fm > 0) pos = mid;
        else neg = mid;
    }
    return std::abs(f(pos)) <= std::abs(f(neg)) ? pos : neg;
}

// First zero of F met when walking from `from` (where F > 0) to `to`.
// `to` is included (closed end). Throws ConsistencyError when F never turns
// nonpositive on the scan.
inline double first_zero_from(const EvalContext& ctx, double from, double to, const char* what, int n = 128) {
    auto f = [&](double u) { return big_f(ctx, u); };
    double prev_u = from;
    if (!(f(from) > 0)) {
        if (f(from) == 0) return from;
        throw ConsistencyError(std::string(what) + ": F is not positive at the start of the bracket",
                               grid_dump(ctx, std::min(from, to), std::max(from, to)));
    }
    for (int i = 1; i <= n; ++i) {
        const double u = (i == n) ? to : from + (to - from) * i / n;
        const double fu = f(u);
        if (!(fu > 0)) {
            if (fu == 0) return u;
            return bisect(f, prev_u, u);
        }
        prev_u = u;
    }
    // closed-end convention: a numerically vanishing value at `to` counts
    if (std::abs(f(to)) <= 1e-12) return to;
    throw ConsistencyError(std::string(what) + ": no sign change of F where one is guaranteed",
                           grid_dump(ctx, std::min(from, to), std::max(from, to)));
}

} // namespace detail

// Solutions of p(u) = -level (level >= 0), returned as (negative, positive).
// A side without a solution is reported as -inf / +inf.
inline std::pair<double, double> ladder_level(const EvalContext& ctx_in, double level) {
    const auto ctx = ctx_in.canonical();
    const auto& m = ctx.params;
    const double qa = m.c * m.c * (m.rho * m.rho - 1.0);
    const double qb = m.c * m.c - 2.0 * m.a * m.rho * m.c;
    const double qc = m.a * m.a + level;
    if (qa == 0.0) {
        if (qb == 0.0) return {-kInf, kInf};
        const double u = -qc / qb;
        return u < 0 ? std::pair{u, kInf} : std::pair{-kInf, u};
    }
    // qa < 0 < qc: one negative and one positive real root
    const double disc = qb * qb - 4.0 * qa * qc;
    const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
    const double r1 = q / qa;
    const double r2 = qc / q;
    return {std::min(r1, r2), std::max(r1, r2)};
}

inline std::pair<double, double> roots_of_p(const EvalContext& ctx) { return ladder_level(ctx, 0.0); }

// t0 = 2 / (c rho u_+ - a) when a < c rho; 0 when u_+ is infinite.
inline std::optional<double> t_zero(const EvalContext& ctx_in) {
    const auto ctx = ctx_in.canonical();
    const auto& m = ctx.params;
    if (detail::is_a_eq_rhoc(m) || m.a > m.c * m.rho) return std::nullopt;
    const double up = roots_of_p(ctx).second;
    if (std::isinf(up)) return 0.0;
    return 2.0 / (m.c * m.rho * up - m.a);
}

inline BracketLadder bracket_ladder(const EvalContext& ctx, int n_max) {
    if (n_max < 0) throw ValidationError("n_max", "must be >= 0");
    const double t = ctx.t();
    const double pi2 = std::numbers::pi * std::numbers::pi;
    BracketLadder out;
    out.alpha.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) out.alpha.push_back(ladder_level(ctx, 4.0 * n * n * pi2 / (t * t)));
    out.beta1 = ladder_level(ctx, pi2 / (t * t));
    return out;
}

inline DomainReport abscissae(const EvalContext& ctx_in) {
    const auto ctx = ctx_in.canonical();
    const auto& m = ctx.params;
    const double t = ctx.t();
    const double pi2 = std::numbers::pi * std::numbers::pi;

    DomainReport rep;
    std::tie(rep.u_minus, rep.u_plus) = roots_of_p(ctx);
    rep.t0 = t_zero(ctx);

    if (detail::is_c_eq_2a_rho1(m)) {
        rep.case_label = CaseLabel::Rho1_c_eq_2a;
        rep.u_star_plus = 1.0 / (-std::expm1(-m.a * t));
        rep.u_star_minus = -kInf;
        return rep;
    }

    const auto alpha1 = ladder_level(ctx, 4.0 * pi2 / (t * t));
    const auto beta1 = ladder_level(ctx, pi2 / (t * t));

    if (detail::is_a_eq_rhoc(m)) {
        // u_+ = 1 and F(1) = 1: the zero lies beyond 1, below beta_{+1}
        rep.case_label = CaseLabel::A_eq_rhoc;
        rep.u_star_plus = detail::first_zero_from(ctx, 1.0, beta1.second, "abscissae (a = c rho)");
    } else if (m.a > m.c * m.rho) {
        rep.case_label = CaseLabel::A_gt_rhoc;
        rep.u_star_plus = std::isinf(rep.u_plus)
                              ? kInf
                              : detail::first_zero_from(ctx, rep.u_plus, alpha1.second, "abscissae (a > c rho)");
    } else if (t < *rep.t0) {
        rep.case_label = CaseLabel::A_lt_rhoc_pre_t0;
        rep.u_star_plus = detail::first_zero_from(ctx, rep.u_plus, beta1.second, "abscissae (a < c rho, t < t0)");
    } else {
        rep.case_label = CaseLabel::A_lt_rhoc_post_t0;
        if (std::isfinite(rep.u_plus)) {
            rep.u_star_plus = detail::first_zero_from(ctx, 1.0, rep.u_plus, "abscissae (a < c rho, t >= t0)");
        } else {
            // rho = 1, c > 2a: p > 0 on (0, inf); expand until F turns negative
            double hi = 2.0;
            while (big_f(ctx, hi) > 0) {
                hi *= 2.0;
                if (hi > 1e15)
                    throw ConsistencyError("abscissae: no zero of F found on (1, 1e15)",
                                           detail::grid_dump(ctx, 1.0, hi));
            }
            rep.u_star_plus = detail::first_zero_from(ctx, 1.0, hi, "abscissae (a < c rho, u_+ infinite)");
        }
    }

    rep.u_star_minus = std::isinf(rep.u_minus)
                           ? -kInf
                           : detail::first_zero_from(ctx, rep.u_minus, alpha1.first, "abscissae (left side)");
    return rep;
}

// u_-^*(a, c, rho, t) = 1 - u_+^*(a - c rho, c, -rho, t).
inline double left_via_inversion(const EvalContext& ctx_in) {
    const auto ctx = ctx_in.canonical();
    const EvalContext inv(invert_model(ctx.params), ctx.horizon, ctx.tol);
    const double right = abscissae(inv).u_star_plus;
    return std::isinf(right) ? -kInf : 1.0 - right;
}

struct AbscissaPoint {
    double t;
    double u_star_minus;
    double u_star_plus;
};

inline std::vector<AbscissaPoint> abscissa_curve(const EvalContext& ctx, const std::vector<double>& t_grid) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0) || !std::isfinite(t_grid[i])) throw ValidationError("t_grid", "horizons must be finite and > 0");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw ValidationError("t_grid", "must be strictly increasing");
    }
    std::vector<AbscissaPoint> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        try {
            const auto rep = abscissae(EvalContext(ctx.params, Horizon{t}, ctx.tol));
            out.push_back({t, rep.u_star_minus, rep.u_star_plus});
        } catch (const ConsistencyError& e) {
            throw ConsistencyError(std::string(e.what()) + " (at t = " + std::to_string(t) + ")", e.diagnostics());
        }
    }
    for (std::size_t i = 1; i < out.size(); ++i) {
        const auto& a = out[i - 1];
        const auto& b = out[i];
        if (b.u_star_plus > a.u_star_plus + 1e-9 || b.u_star_minus < a.u_star_minus - 1e-9)
            throw ConsistencyError("abscissa_curve: abscissae are not monotone in t between t = " +
                                   std::to_string(a.t) + " and t = " + std::to_string(b.t));
    }
    return out;
}

} // namespace hestonlaw
