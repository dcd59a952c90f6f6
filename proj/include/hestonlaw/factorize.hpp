#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "charfn.hpp"
#include "domain.hpp"
#include "errors.hpp"

namespace hestonlaw {

// Power-law fit |a_n| ~ kappa (n + delta)^q of one side's roots, used to
// estimate sum_{n > m} 1 / a_n^2 beyond the last kept root.
struct RootTailFit {
    int count = 0;  // roots kept on this side
    double kappa = 0.0;
    double delta = 0.0;
    double q = 1.0;
    double inv_sq_tail = 0.0;
};

struct Factorization {
    std::vector<double> roots;     // a_n, increasing |a_n|
    std::vector<double> residues;  // b_n > 0
    double xi = 0.0;               // 2ab/c^2
    std::vector<double> c_shift;   // c_n = -(v0 b_n + xi) / a_n
    std::vector<double> g_coef;    // g_n = v0 b_n / a_n
    double nu = 0.0;
    double d_shift = 0.0;
    int n_terms = 0;

    double g0 = 0.0;           // G(0) = (1 - e^{-at}) / (2a)
    double b_inf = 0.0;        // limit of b_n
    double inv_sq_tail = 0.0;  // estimate of sum_{n > N} 1 / a_n^2, both sides
    RootTailFit positive_fit;
    RootTailFit negative_fit;
};

namespace detail {

// log(1 - x) + x without cancellation for small x.
inline double log1m_plus(double x) {
    if (std::abs(x) < 0.1) {
        double term = x;
        double sum = 0.0;
        for (int k = 2; k < 60; ++k) {
            term *= x;
            const double add = term / k;
            sum -= add;
            if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::log1p(-x) + x;
}

inline int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// Zeros of F inside [lo, hi] located by a sign grid plus bisection. The grid
// is doubled (up to 512 points) while the number of sign changes disagrees
// with the endpoint parity.
inline void scan_interval(const EvalContext& ctx, double lo, double hi, std::vector<double>& out) {
    auto f = [&](double u) { return big_f(ctx, u); };
    const int parity = sign_of(f(lo)) * sign_of(f(hi));  // -1: odd number of zeros
    for (int n = 32;; n *= 2) {
        std::vector<double> us(n + 1), fs(n + 1);
        for (int i = 0; i <= n; ++i) {
            us[i] = (i == n) ? hi : lo + (hi - lo) * i / n;
            fs[i] = f(us[i]);
        }
        std::vector<std::pair<int, int>> changes;  // cells [i, i+1] with a sign change
        std::vector<double> exact;
        for (int i = 0; i <= n; ++i) {
            if (fs[i] == 0.0) exact.push_back(us[i]);
            if (i < n && sign_of(fs[i]) * sign_of(fs[i + 1]) < 0) changes.emplace_back(i, i + 1);
        }
        const int count = static_cast<int>(changes.size() + exact.size());
        const bool parity_ok = (parity < 0) ? (count % 2 == 1) : (count % 2 == 0);
        if (count > 2) {
            std::ostringstream os;
            os.precision(17);
            os << "interval [" << lo << ", " << hi << "] has " << count << " sign changes of F";
            throw ConsistencyError("enumerate_roots: more than two zeros in one ladder interval", os.str());
        }
        if (parity_ok || n >= 512) {
            for (auto [i, j] : changes) {
                const double pos = fs[i] > 0 ? us[i] : us[j];
                const double neg = fs[i] > 0 ? us[j] : us[i];
                out.push_back(bisect(f, pos, neg));
            }
            out.insert(out.end(), exact.begin(), exact.end());
            return;
        }
    }
}

inline bool ladder_exists(double u_root) { return std::isfinite(u_root); }

inline void sort_by_magnitude(std::vector<double>& v) {
    std::sort(v.begin(), v.end(), [](double x, double y) {
        return std::abs(x) < std::abs(y) || (std::abs(x) == std::abs(y) && x < y);
    });
    auto same = [](double x, double y) { return std::abs(x - y) <= 1e-10 * std::max(std::abs(x), std::abs(y)); };
    v.erase(std::unique(v.begin(), v.end(), same), v.end());
}

} // namespace detail

// All zeros of F found in the ladder intervals (alpha_{+n}, alpha_{+(n+1)})
// and (alpha_{-(n+1)}, alpha_{-n}), n = 0..levels-1 with alpha_{+-0} = u_+-,
// plus [1, u_+] when t >= t0. Sorted by increasing modulus.
inline std::vector<double> enumerate_roots(const EvalContext& ctx_in, int levels) {
    const auto ctx = ctx_in.canonical();
    const auto& m = ctx.params;
    if (detail::is_c_eq_2a_rho1(m))
        throw UnsupportedCaseError("enumerate_roots: rho = 1 with c = 2a has a single pole; no factorization");
    if (levels < 1) throw ValidationError("levels", "must be >= 1");
    const double t = ctx.t();
    const auto [um, up] = roots_of_p(ctx);
    const bool below_rhoc = !detail::is_a_eq_rhoc(m) && m.a < m.c * m.rho;
    const auto t0 = t_zero(ctx);
    const double pi2 = std::numbers::pi * std::numbers::pi;

    std::vector<std::pair<double, double>> alpha(levels + 1);
    alpha[0] = {um, up};
    for (int n = 1; n <= levels; ++n) alpha[n] = ladder_level(ctx, 4.0 * n * n * pi2 / (t * t));

    std::vector<double> roots;
    if (detail::ladder_exists(up)) {
        if (below_rhoc && t >= *t0) detail::scan_interval(ctx, 1.0, up, roots);
        for (int n = 0; n < levels; ++n) detail::scan_interval(ctx, alpha[n].second, alpha[n + 1].second, roots);
    } else if (below_rhoc) {
        roots.push_back(abscissae(ctx).u_star_plus);  // rho = 1, c > 2a: one positive zero
    }
    if (detail::ladder_exists(um)) {
        for (int n = 0; n < levels; ++n) detail::scan_interval(ctx, alpha[n + 1].first, alpha[n].first, roots);
    }
    detail::sort_by_magnitude(roots);
    return roots;
}

// b_n = 4 p (1 - a_n) / (t p' p - 4 c rho p - p' k (k t + 2)), k = a - c rho a_n,
// all evaluated at a_n; b_n is minus the residue of G at a_n.
inline std::vector<double> residues(const EvalContext& ctx_in, const std::vector<double>& roots) {
    const auto ctx = ctx_in.canonical();
    const auto& m = ctx.params;
    const double t = ctx.t();
    std::vector<double> out;
    out.reserve(roots.size());
    for (double r : roots) {
        const double p = p_quadratic(ctx, r);
        const double dp = p_prime(ctx, r);
        const double k = kappa_term(ctx, r);
        const double den = t * dp * p - 4.0 * m.c * m.rho * p - dp * k * (k * t + 2.0);
        if (std::abs(den) < 1e-300)
            throw ConsistencyError("residues: degenerate root (vanishing denominator) at a_n = " + std::to_string(r));
        out.push_back(4.0 * p * (1.0 - r) / den);
    }
    return out;
}

namespace detail {

inline RootTailFit fit_side(const std::vector<double>& mags, double q) {
    RootTailFit fit;
    fit.count = static_cast<int>(mags.size());
    fit.q = q;
    if (fit.count < 2) return fit;
    const double m = fit.count;
    const double hi = std::pow(mags[fit.count - 1], 1.0 / q);
    const double lo = std::pow(mags[fit.count - 2], 1.0 / q);
    const double step = hi - lo;
    if (!(step > 0)) return fit;
    fit.kappa = std::pow(step, q);
    fit.delta = hi / step - m;
    const double base = m + 0.5 + fit.delta;
    fit.inv_sq_tail = std::pow(base, 1.0 - 2.0 * q) / (fit.kappa * fit.kappa * (2.0 * q - 1.0));
    return fit;
}

inline std::pair<RootTailFit, RootTailFit> fit_tails(const EvalContext& ctx, const std::vector<double>& roots) {
    std::vector<double> pos, neg;
    for (double r : roots) (r > 0 ? pos : neg).push_back(std::abs(r));
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());
    // p is linear when rho^2 = 1 and the zeros then grow like n^2
    const double q = (ctx.params.rho * ctx.params.rho == 1.0) ? 2.0 : 1.0;
    return {fit_side(pos, q), fit_side(neg, q)};
}

} // namespace detail

// nu(t) from F(1) = e^{(a - rho c) t / 2}:
//   nu = -rho c t / 2 - sum_n [log(1 - 1/a_n) + 1/a_n] - tail,
// with tail ~ -(1/2) sum_{n > N} 1 / a_n^2.
inline double hadamard_nu(const EvalContext& ctx_in, const std::vector<double>& roots) {
    const auto ctx = ctx_in.canonical();
    const auto& m = ctx.params;
    double sum = 0.0;
    for (double r : roots) sum += detail::log1m_plus(1.0 / r);
    const auto [pf, nf] = detail::fit_tails(ctx, roots);
    const double tail = -0.5 * (pf.inv_sq_tail + nf.inv_sq_tail);
    return -0.5 * m.rho * m.c * ctx.t() - sum - tail;
}

inline Factorization build_factorization(const EvalContext& ctx_in, int n_max) {
    const auto ctx = ctx_in.canonical();
    const auto& m = ctx.params;
    const double t = ctx.t();
    if (n_max < 1) throw ValidationError("n_max", "must be >= 1");
    if (detail::is_c_eq_2a_rho1(m))
        throw UnsupportedCaseError("build_factorization: rho = 1 with c = 2a has a single pole; no factorization");

    // Enumerate enough ladder levels that every zero below the last level's
    // modulus is known, then keep the n_max smallest.
    const auto [um, up] = roots_of_p(ctx);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    int levels = std::max(4, n_max / 2 + 4);
    std::vector<double> kept;
    for (;;) {
        auto all = enumerate_roots(ctx, levels);
        const auto top = ladder_level(ctx, 4.0 * levels * levels * pi2 / (t * t));
        double radius = kInf;
        if (std::isfinite(up)) radius = std::min(radius, std::abs(top.second));
        if (std::isfinite(um)) radius = std::min(radius, std::abs(top.first));
        kept.clear();
        for (double r : all)
            if (std::abs(r) < radius) kept.push_back(r);
        if (static_cast<int>(kept.size()) >= n_max || std::isinf(radius)) break;
        levels = levels * 3 / 2 + 1;
    }
    if (static_cast<int>(kept.size()) > n_max) kept.resize(n_max);

    Factorization fz;
    fz.roots = kept;
    fz.n_terms = static_cast<int>(kept.size());
    fz.residues = residues(ctx, kept);
    fz.xi = xi_exponent(m);
    for (int i = 0; i < fz.n_terms; ++i) {
        const double a_n = fz.roots[i];
        const double b_n = fz.residues[i];
        fz.c_shift.push_back(-(m.v0 * b_n + fz.xi) / a_n);
        fz.g_coef.push_back(m.v0 * b_n / a_n);
    }
    fz.nu = hadamard_nu(ctx, kept);
    const double one_minus_exp = -std::expm1(-m.a * t);
    fz.d_shift = m.x0 - m.rho * m.a * m.b * t / m.c - fz.xi * fz.nu - m.v0 * one_minus_exp / (2.0 * m.a);
    fz.g0 = one_minus_exp / (2.0 * m.a);
    fz.b_inf = (m.rho * m.rho == 1.0 ? 4.0 : 2.0) / (t * m.c * m.c);
    std::tie(fz.positive_fit, fz.negative_fit) = detail::fit_tails(ctx, kept);
    fz.inv_sq_tail = fz.positive_fit.inv_sq_tail + fz.negative_fit.inv_sq_tail;
    return fz;
}

namespace detail {

inline void check_not_pole(const Factorization& fz, double u) {
    for (double r : fz.roots)
        if (std::abs(u - r) <= 1e-12 * (1.0 + std::abs(u)))
            throw PoleError("evaluation at a zero of F", r);
}

inline void check_in_disc(const Factorization& fz, double u, const char* what) {
    if (fz.roots.empty()) return;
    if (!(std::abs(u) < std::abs(fz.roots.front())))
        throw DomainError(std::string(what) + ": |u| must be below |a_1| = " + std::to_string(std::abs(fz.roots.front())));
}

} // namespace detail

struct MittagLefflerValue {
    double value;
    double tail;       // analytic estimate of the omitted terms, already included in value
    double tolerance;  // declared accuracy of value
};

// G(u) = G(0) - u sum_n b_n / (a_n^2 (1 - u/a_n)), truncated at n_terms plus
// the tail b_inf * sum_{n > N} 1/a_n^2.
inline MittagLefflerValue mittag_leffler_eval(const Factorization& fz, double u) {
    detail::check_not_pole(fz, u);
    double sum = 0.0;
    for (int i = 0; i < fz.n_terms; ++i) {
        const double a_n = fz.roots[i];
        sum += fz.residues[i] / (a_n * a_n * (1.0 - u / a_n));
    }
    const double tail = -u * fz.b_inf * fz.inv_sq_tail;
    return {fz.g0 - u * sum + tail, tail, std::abs(tail) + 1e-14};
}

// Truncated Hadamard product
//   F(u) = e^{at/2} e^{nu u} prod (1 - u/a_n) e^{u/a_n}
// with the same 1/a_n^2 tail correction; restricted to |u| < |a_1|.
inline double hadamard_eval(const EvalContext& ctx, const Factorization& fz, double u) {
    detail::check_in_disc(fz, u, "hadamard_eval");
    double log_f = 0.5 * ctx.params.a * ctx.t() + fz.nu * u;
    for (double r : fz.roots) log_f += detail::log1m_plus(u / r);
    log_f -= 0.5 * u * u * fz.inv_sq_tail;
    return std::exp(log_f);
}

// exp(d u) prod N_n(u), N_n(u) = e^{c_n u} (1 - u/a_n)^{-xi} exp(g_n u / (1 - u/a_n)).
// Each factor's log is written as -xi (log(1-x) + x) + v0 b_n x^2/(1-x),
// x = u/a_n, which is the same quantity without the cancellation.
inline double mgf_from_factors(const Factorization& fz, double u) {
    detail::check_in_disc(fz, u, "mgf_from_factors");
    double log_m = fz.d_shift * u;
    for (int i = 0; i < fz.n_terms; ++i) {
        const double x = u / fz.roots[i];
        const double v0b = fz.g_coef[i] * fz.roots[i];
        log_m += -fz.xi * detail::log1m_plus(x) + v0b * x * x / (1.0 - x);
    }
    return std::exp(log_m);
}

} // namespace hestonlaw
