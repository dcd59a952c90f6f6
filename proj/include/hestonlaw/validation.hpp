#pragma once

// Cross-validation suites: the fixed-parameter acceptance criteria and the
// invariant checks that `check` runs on user parameters.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "density.hpp"
#include "domain.hpp"
#include "factorize.hpp"
#include "mgf.hpp"
#include "oracle.hpp"
#include "special.hpp"
#include "wings.hpp"

namespace hestonlaw {

struct CheckRow {
    std::string name;
    bool pass = false;
    double measured = 0.0;  // may be +inf when the check is about an explosion
    double tolerance = 0.0;
    std::string note;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<CheckRow> rows;
    double seconds = 0.0;
    double limit_seconds = 0.0;

    bool pass() const {
        if (limit_seconds > 0 && !(seconds < limit_seconds)) return false;
        return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
    }
};

namespace detail {

inline CheckRow below(std::string name, double measured, double tol, std::string note = {}) {
    return {std::move(name), measured < tol, measured, tol, std::move(note)};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline EvalContext steep_context(double v0 = 0.0225) {
    return EvalContext(make_params(2.0, 0.0225, 0.8, -0.9, 1.0, v0, 0.0), Horizon{1.0});
}

inline EvalContext desk_context() {
    return EvalContext(make_params(2.0, 0.04, 0.3, -0.7, 1.0, 0.04, 0.0), Horizon{1.0});
}

// Interior grid of the MGF domain, with infinite ends capped.
inline std::vector<double> interior_grid(const DomainReport& d, int n, double cap = 5.0, double shrink = 0.9) {
    const double lo = std::max(d.u_star_minus, -cap);
    const double hi = std::min(d.u_star_plus, cap);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo) * shrink;
    return linspace(mid - half, mid + half, n);
}

// int_0^inf e^{s y} h(y) dy for the factor reflected onto (0, inf).
inline double factor_transform(const BesselFactor& f, double s) {
    BesselFactor pos = f;
    pos.gamma = std::abs(f.gamma);
    pos.zeta = std::abs(f.zeta);
    pos.shift = 0.0;
    boost::math::quadrature::exp_sinh<double> integrator;
    auto integrand = [&](double y) {
        const double ld = factor_log_density(pos, y);
        return std::isinf(ld) ? 0.0 : std::exp(s * y + ld);
    };
    return integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
}

} // namespace detail

// 1: abscissae and Lee coefficients of the steep reference set.
inline CriterionResult criterion_steep_example() {
    detail::Stopwatch sw;
    CriterionResult r{1, "steep set: abscissae and wing coefficients", {}, 0.0, 1.0};
    const auto ctx = detail::steep_context();
    const auto dom = abscissae(ctx);
    const auto w = wing_report(ctx);
    auto round2 = [](double x) { return std::round(100.0 * x) / 100.0; };
    r.rows.push_back(detail::below("u_star_plus vs 37.43", std::abs(dom.u_star_plus - 37.43), 0.01 + 1e-12));
    r.rows.push_back(detail::below("u_star_minus vs -3.21", std::abs(dom.u_star_minus + 3.21), 0.01 + 1e-12));
    r.rows.push_back({"beta_R rounds to 0.01", std::abs(round2(w.beta_R) - 0.01) < 1e-12, w.beta_R, 0.0,
                      "rounded value " + std::to_string(round2(w.beta_R))});
    r.rows.push_back({"beta_L rounds to 0.13", std::abs(round2(w.beta_L) - 0.13) < 1e-12, w.beta_L, 0.0,
                      "rounded value " + std::to_string(round2(w.beta_L))});
    r.seconds = sw.seconds();
    return r;
}

// 2: the two characteristic function forms agree on 20 random parameter sets.
inline CriterionResult criterion_form_equivalence() {
    detail::Stopwatch sw;
    CriterionResult r{2, "characteristic function forms agree", {}, 0.0, 5.0};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    const auto us = detail::linspace(-100.0, 100.0, 1000);
    for (int set = 0; set < 20; ++set) {
        double rho = draw(-0.99, 0.99);
        if (set == 0) rho = -0.99;
        if (set == 1) rho = 0.99;
        const EvalContext ctx(make_params(draw(0.2, 5.0), draw(0.01, 0.25), draw(0.1, 2.0), rho, draw(0.5, 2.0),
                                          draw(0.005, 0.25), 0.0),
                              Horizon{draw(0.1, 5.0)});
        const auto lnew = log_charfn_new_grid(ctx, us);
        double worst = 0.0;
        for (std::size_t i = 0; i < us.size(); ++i)
            worst = std::max(worst, log_relative_difference(lnew[i], log_charfn_albrecher(ctx, us[i])));
        r.rows.push_back(detail::below("set " + std::to_string(set) + " max relative difference", worst, 1e-10));
    }
    r.seconds = sw.seconds();
    return r;
}

// 3: martingale, sign flip, time scaling and inversion identities.
inline CriterionResult criterion_identities() {
    detail::Stopwatch sw;
    CriterionResult r{3, "martingale and model identities", {}, 0.0, 2.0};
    const std::vector<ModelParams> sets = {
        make_params(2.0, 0.0225, 0.8, -0.9, 1.0, 0.0225),
        make_params(1.5, 0.04, 0.5, -0.7, 1.2, 0.05),
        make_params(0.5, 0.09, 1.0, 0.3, 0.8, 0.02),
        make_params(3.0, 0.05, 1.5, 0.6, 1.0, 0.1),
    };
    const std::vector<double> horizons = {1.0, 0.5, 2.0, 1.5};
    double mart = 0.0, flip = 0.0, scale = 0.0, inv = 0.0;
    for (std::size_t k = 0; k < sets.size(); ++k) {
        const EvalContext ctx(sets[k], Horizon{horizons[k]});
        const MgfEvaluator mgf_eval(ctx);
        mart = std::max(mart, std::abs(mgf_eval(1.0) - std::exp(ctx.params.x0)));

        const auto& p = ctx.params;
        const EvalContext flipped(make_raw_params(p.a, p.b, -p.c, -p.rho, p.s0, p.v0, p.mu), ctx.horizon);
        const auto grid = detail::interior_grid(mgf_eval.domain(), 20);
        for (double u : grid)
            flip = std::max(flip, detail::rel_err(std::exp(log_mgf_formula(flipped, u)), mgf_eval(u)));

        for (double lambda : {0.5, 2.0}) {
            const auto [q, h] = rescale(p, ctx.horizon, lambda);
            const MgfEvaluator scaled(EvalContext(q, h));
            for (double u : grid) scale = std::max(scale, detail::rel_err(scaled(u), mgf_eval(u)));
        }

        if (p.a > p.c * p.rho) {
            const MgfEvaluator inverted(EvalContext(invert_model(p), ctx.horizon));
            const auto& d1 = mgf_eval.domain();
            const auto& d2 = inverted.domain();
            DomainReport both;
            both.u_star_minus = std::max({d1.u_star_minus, 1.0 - d1.u_star_plus, d2.u_star_minus});
            both.u_star_plus = std::min({d1.u_star_plus, 1.0 - d1.u_star_minus, d2.u_star_plus});
            for (double u : detail::interior_grid(both, 20))
                inv = std::max(inv, detail::rel_err(mgf_eval(1.0 - u), std::exp(p.x0) * inverted(u)));
        }
    }
    r.rows.push_back(detail::below("|M(1) - e^x0|", mart, 1e-12));
    r.rows.push_back(detail::below("sign flip relative difference", flip, 1e-14));
    r.rows.push_back(detail::below("time scaling relative difference (lambda 0.5, 2)", scale, 1e-12));
    r.rows.push_back(detail::below("inversion identity relative difference", inv, 1e-10));
    r.seconds = sw.seconds();
    return r;
}

// 4: closed-form MGF against Monte Carlo, plus the explosion marker.
inline CriterionResult criterion_mgf_vs_mc(std::uint64_t seed = 20240611) {
    detail::Stopwatch sw;
    CriterionResult r{4, "MGF against Monte Carlo", {}, 0.0, 60.0};
    const std::vector<EvalContext> sets = {
        EvalContext(make_params(2.0, 0.0225, 0.8, -0.9, 1.0, 0.0225), Horizon{1.0}),
        EvalContext(make_params(1.5, 0.04, 0.5, -0.7, 1.0, 0.04), Horizon{1.0}),
        EvalContext(make_params(3.0, 0.09, 1.0, -0.5, 1.0, 0.06), Horizon{0.5}),
    };
    const std::vector<double> us = {-0.5, 0.5, 1.0, 2.0};
    for (std::size_t k = 0; k < sets.size(); ++k) {
        const MgfEvaluator mgf_eval(sets[k]);
        const std::string tag = "set " + std::to_string(k + 1) + " ";
        r.rows.push_back({tag + "u_star_plus > 2", mgf_eval.domain().u_star_plus > 2.0, mgf_eval.domain().u_star_plus, 2.0});
        McConfig mc;
        mc.paths = 1000000;
        mc.steps_per_unit_time = 256;
        mc.seed = seed + k;
        for (const auto& e : mc_mgf(sets[k], mc, us)) {
            const double z = std::abs(e.estimate - mgf_eval(e.u)) / e.se;
            r.rows.push_back(detail::below(tag + "u=" + std::to_string(e.u) + " |MC - M| / SE", z, 3.0));
        }
        const double beyond = mgf_eval(mgf_eval.domain().u_star_plus + 0.01);
        r.rows.push_back({tag + "explosion marker at u_star_plus + 0.01", std::isinf(beyond), beyond, kInf});
    }
    r.seconds = sw.seconds();
    return r;
}

// 5: monotonicity of the abscissae in t and the t -> 0, t -> inf limits.
inline CriterionResult criterion_monotone_abscissae() {
    detail::Stopwatch sw;
    CriterionResult r{5, "abscissae monotone in t", {}, 0.0, 2.0};
    const auto ctx = detail::steep_context();
    const std::vector<double> ts = {0.05, 0.25, 1.0, 5.0, 25.0, 50.0};
    std::vector<DomainReport> reps;
    for (double t : ts) reps.push_back(abscissae(EvalContext(ctx.params, Horizon{t})));
    double up_violation = -kInf, um_violation = -kInf;
    for (std::size_t i = 1; i < reps.size(); ++i) {
        up_violation = std::max(up_violation, reps[i].u_star_plus - reps[i - 1].u_star_plus);
        um_violation = std::max(um_violation, reps[i - 1].u_star_minus - reps[i].u_star_minus);
    }
    r.rows.push_back({"max increase of u_star_plus", up_violation <= 0.0, up_violation, 0.0});
    r.rows.push_back({"max decrease of u_star_minus", um_violation <= 0.0, um_violation, 0.0});
    r.rows.push_back(detail::below("|u_star_plus(50) - u_plus|", std::abs(reps.back().u_star_plus - reps.back().u_plus), 0.01));
    r.rows.push_back({"u_star_plus(0.05) > 100", reps.front().u_star_plus > 100.0, reps.front().u_star_plus, 100.0});
    r.seconds = sw.seconds();
    return r;
}

// 6: factored MGF, Mittag-Leffler and Hadamard reconstructions, residues.
inline CriterionResult criterion_factorization() {
    detail::Stopwatch sw;
    CriterionResult r{6, "factorization fidelity", {}, 0.0, 10.0};
    const auto ctx = detail::steep_context();
    const MgfEvaluator mgf_eval(ctx);
    const auto f200 = build_factorization(ctx, 200);
    const auto f500 = build_factorization(ctx, 500);
    const double a1 = std::abs(f200.roots.front());
    const auto grid = detail::linspace(-0.9 * a1, 0.9 * a1, 20);
    double e_mgf = 0.0, e_ml = 0.0, e_had = 0.0;
    for (double u : grid) {
        e_mgf = std::max(e_mgf, detail::rel_err(mgf_from_factors(f200, u), mgf_eval(u)));
        e_ml = std::max(e_ml, std::abs(mittag_leffler_eval(f500, u).value - big_g(ctx, u)));
        e_had = std::max(e_had, detail::rel_err(hadamard_eval(ctx, f500, u), big_f(ctx, u)));
    }
    r.rows.push_back(detail::below("factored MGF relative error (n=200)", e_mgf, 1e-4));
    r.rows.push_back(detail::below("Mittag-Leffler vs G (n=500)", e_ml, 1e-6));
    r.rows.push_back(detail::below("Hadamard vs F relative error (n=500)", e_had, 1e-6));
    const double min_b = std::min(*std::min_element(f200.residues.begin(), f200.residues.end()),
                                  *std::min_element(f500.residues.begin(), f500.residues.end()));
    r.rows.push_back({"all b_n > 0", min_b > 0.0, min_b, 0.0});
    const double b_lim = 2.0 / (ctx.t() * ctx.params.c * ctx.params.c);
    r.rows.push_back(detail::below("|b_200 / (2/(t c^2)) - 1|", std::abs(f200.residues.back() / b_lim - 1.0), 0.01));
    r.seconds = sw.seconds();
    return r;
}

// 7: convergence of the factor convolution to the Fourier reference density.
inline CriterionResult criterion_density() {
    detail::Stopwatch sw;
    CriterionResult r{7, "density approximation converges", {}, 0.0, 120.0};
    const auto ctx = detail::desk_context();
    const GridSpec grid{-2.5, 1.5, 4001};
    const auto ref = reference_density(ctx, grid);
    const auto fz = build_factorization(ctx, 50);
    std::vector<double> l1;
    double cdf = 0.0;
    for (int n : {10, 25, 50}) {
        const auto approx = approx_law(ctx, fz, n, grid);
        l1.push_back(l1_distance(approx, ref));
        cdf = cdf_distance(approx, ref);
        r.rows.push_back({"L1 distance, " + std::to_string(n) + " factors", true, l1.back(), 0.0, "reported"});
    }
    const double worst_step = std::max(l1[1] - l1[0], l1[2] - l1[1]);
    r.rows.push_back({"L1 strictly decreasing (max step)", worst_step < 0.0, worst_step, 0.0});
    r.rows.push_back(detail::below("final L1 distance", l1.back(), 0.01));
    r.rows.push_back(detail::below("final CDF sup distance", cdf, 0.005));
    double worst_mgf = 0.0;
    for (const auto& f : factors_of(fz, 50)) {
        const double s = 0.5 * std::abs(f.gamma);
        BesselFactor unshifted = f;
        unshifted.shift = 0.0;
        worst_mgf = std::max(worst_mgf, detail::rel_err(detail::factor_transform(f, s), factor_mgf(unshifted, 0.5 * f.gamma)));
    }
    r.rows.push_back(detail::below("per-factor MGF recovery at u = gamma/2", worst_mgf, 1e-6));
    r.seconds = sw.seconds();
    return r;
}

// 8: special functions.
inline CriterionResult criterion_special() {
    detail::Stopwatch sw;
    CriterionResult r{8, "special functions", {}, 0.0, 1.0};
    double l_err = 0.0;
    for (int k = 0; k <= 120; ++k) {
        const double mag = std::pow(10.0, -8.0 + 12.0 * k / 120.0);
        const double s = std::sqrt(mag);
        l_err = std::max({l_err, detail::rel_err(L1(mag), std::cosh(s)), detail::rel_err(L1(-mag), std::cos(s)),
                          detail::rel_err(L2(mag), std::sinh(s) / s), detail::rel_err(L2(-mag), std::sin(s) / s)});
    }
    r.rows.push_back(detail::below("L1/L2 vs cosh/cos/sinh/sin composites", l_err, 1e-12,
                                   "relative, |x| in [1e-8, 1e4] away from trig zeros"));

    double rec = 0.0;
    for (double nu : {0.5, 1.3, 2.7, 5.0, 10.25})
        for (double x : {0.1, 1.0, 5.0, 20.0, 50.0, 200.0, 600.0}) {
            const double lhs = bessel_i_scaled(nu - 1.0, x) - bessel_i_scaled(nu + 1.0, x);
            rec = std::max(rec, detail::rel_err(lhs, 2.0 * nu / x * bessel_i_scaled(nu, x)));
        }
    r.rows.push_back(detail::below("Bessel recurrence I_{v-1} - I_{v+1} = (2v/x) I_v", rec, 1e-8));

    double sw_err = 0.0;
    for (double nu : {0.0, 0.5, 1.7, 3.0, 5.5, 6.0}) {
        const double x = std::max(30.0, nu * nu);
        bool ok = false;
        const double a = detail::log_bessel_i_asymptotic(nu, x, ok);
        const double s = detail::log_bessel_i_series(nu, x);
        sw_err = std::max(sw_err, ok ? std::abs(std::expm1(a - s)) : kInf);
    }
    r.rows.push_back(detail::below("Bessel series/asymptotic agreement at the switch", sw_err, 1e-9));

    const double sqrt_pi = std::sqrt(std::numbers::pi);
    double g_err = 0.0;
    g_err = std::max(g_err, detail::rel_err(gamma_fn(1.0), 1.0));
    g_err = std::max(g_err, detail::rel_err(gamma_fn(0.5), sqrt_pi));
    g_err = std::max(g_err, detail::rel_err(gamma_fn(5.0), 24.0));
    g_err = std::max(g_err, detail::rel_err(gamma_fn(4.5), 105.0 / 16.0 * sqrt_pi));
    g_err = std::max(g_err, detail::rel_err(gamma_fn(11.0), 3628800.0));
    r.rows.push_back(detail::below("Gamma spot values", g_err, 1e-12));
    r.seconds = sw.seconds();
    return r;
}

inline CriterionResult run_criterion(int id, std::uint64_t seed = 20240611) {
    switch (id) {
    case 1: return criterion_steep_example();
    case 2: return criterion_form_equivalence();
    case 3: return criterion_identities();
    case 4: return criterion_mgf_vs_mc(seed);
    case 5: return criterion_monotone_abscissae();
    case 6: return criterion_factorization();
    case 7: return criterion_density();
    case 8: return criterion_special();
    default: throw ValidationError("criterion", "unknown criterion " + std::to_string(id));
    }
}

// Invariants on arbitrary user parameters. `full` adds Monte Carlo and the
// factor-density checks.
inline std::vector<CheckRow> run_invariant_checks(const EvalContext& ctx_in, bool full, std::uint64_t seed) {
    const auto ctx = ctx_in.canonical();
    const auto& p = ctx.params;
    std::vector<CheckRow> rows;
    const MgfEvaluator mgf_eval(ctx);
    const auto& dom = mgf_eval.domain();

    const bool closed = dom.case_label == CaseLabel::Rho1_c_eq_2a;
    if (!closed && std::isfinite(dom.u_star_plus) && dom.case_label != CaseLabel::A_eq_rhoc)
        rows.push_back(detail::below("|F(u_star_plus)|", std::abs(big_f(ctx, dom.u_star_plus)), 1e-9));
    if (!closed && std::isfinite(dom.u_star_minus))
        rows.push_back(detail::below("|F(u_star_minus)|", std::abs(big_f(ctx, dom.u_star_minus)), 1e-9));
    {
        const double lo = std::isfinite(dom.u_star_minus) ? dom.u_star_minus + 1e-6 * (1 + std::abs(dom.u_star_minus)) : -50.0;
        const double hi = std::isfinite(dom.u_star_plus) ? dom.u_star_plus - 1e-6 * (1 + std::abs(dom.u_star_plus)) : 50.0;
        double min_f = kInf;
        for (double u : detail::linspace(lo, hi, 10000)) min_f = std::min(min_f, big_f(ctx, u));
        rows.push_back({"F > 0 strictly inside the domain (10^4 scan)", min_f > 0.0, min_f, 0.0});
    }
    rows.push_back(detail::below("|M(0) - 1|", std::abs(mgf_eval(0.0) - 1.0), 1e-15));
    rows.push_back(detail::below("relative |M(1) - e^x0|", detail::rel_err(mgf_eval(1.0), std::exp(p.x0)), 1e-12));
    if (std::isfinite(dom.u_star_plus)) {
        const double beyond = mgf_eval(dom.u_star_plus + 0.01);
        rows.push_back({"explosion marker beyond u_star_plus", std::isinf(beyond), beyond, kInf});
    }

    const auto grid = detail::interior_grid(dom, 20);
    {
        const EvalContext flipped(make_raw_params(p.a, p.b, -p.c, -p.rho, p.s0, p.v0, p.mu), ctx.horizon);
        double flip = 0.0, scale = 0.0;
        for (double u : grid) flip = std::max(flip, detail::rel_err(std::exp(log_mgf_formula(flipped, u)), mgf_eval(u)));
        for (double lambda : {0.5, 2.0, ctx.t() / 2.0}) {
            const auto [q, h] = rescale(p, ctx.horizon, lambda);
            const MgfEvaluator scaled(EvalContext(q, h));
            for (double u : grid) scale = std::max(scale, detail::rel_err(scaled(u), mgf_eval(u)));
        }
        rows.push_back(detail::below("sign flip relative difference", flip, 1e-14));
        rows.push_back(detail::below("time scaling relative difference", scale, 1e-12));
    }
    {
        double worst = 0.0;
        const auto inner = detail::interior_grid(dom, 41, 5.0, 0.8);
        const double step = inner[1] - inner[0];
        for (std::size_t i = 1; i + 1 < inner.size(); ++i) {
            const double d2 = mgf_eval(inner[i - 1]) - 2.0 * mgf_eval(inner[i]) + mgf_eval(inner[i + 1]);
            worst = std::min(worst, d2 / (step * step));
        }
        rows.push_back({"MGF convexity (min second difference)", worst >= -1e-8, worst, -1e-8});
    }
    if (p.a > p.c * p.rho && !detail::is_a_eq_rhoc(p)) {
        const double left = left_via_inversion(ctx);
        const double diff = (std::isinf(left) && std::isinf(dom.u_star_minus)) ? 0.0 : std::abs(left - dom.u_star_minus);
        rows.push_back(detail::below("left abscissa via inversion", diff, 1e-8));
        const MgfEvaluator inverted(EvalContext(invert_model(p), ctx.horizon));
        DomainReport both;
        both.u_star_minus = std::max({dom.u_star_minus, 1.0 - dom.u_star_plus, inverted.domain().u_star_minus});
        both.u_star_plus = std::min({dom.u_star_plus, 1.0 - dom.u_star_minus, inverted.domain().u_star_plus});
        double inv = 0.0;
        for (double u : detail::interior_grid(both, 20))
            inv = std::max(inv, detail::rel_err(mgf_eval(1.0 - u), std::exp(p.x0) * inverted(u)));
        rows.push_back(detail::below("inversion identity relative difference", inv, 1e-10));
    }
    {
        const auto us = detail::linspace(-100.0, 100.0, 1000);
        const auto lnew = log_charfn_new_grid(ctx, us);
        double worst = 0.0, modulus = 0.0;
        for (std::size_t i = 0; i < us.size(); ++i) {
            worst = std::max(worst, log_relative_difference(lnew[i], log_charfn_albrecher(ctx, us[i])));
            modulus = std::max(modulus, lnew[i].real());
        }
        rows.push_back(detail::below("charfn forms relative difference", worst, 1e-10));
        rows.push_back({"|phi| <= 1 + 1e-12", modulus <= std::log1p(1e-12), std::exp(modulus), 1.0 + 1e-12});
    }
    if (!closed) {
        const auto f200 = build_factorization(ctx, 200);
        const auto f500 = build_factorization(ctx, 500);
        double pos = kInf, neg = -kInf;
        for (double a : f500.roots) {
            if (a > 0) pos = std::min(pos, a);
            else neg = std::max(neg, a);
        }
        const double mismatch = std::max(std::isinf(pos) && std::isinf(dom.u_star_plus) ? 0.0 : std::abs(pos - dom.u_star_plus),
                                         std::isinf(neg) && std::isinf(dom.u_star_minus) ? 0.0 : std::abs(neg - dom.u_star_minus));
        if (dom.case_label != CaseLabel::A_eq_rhoc)
            rows.push_back(detail::below("extreme roots equal the abscissae", mismatch, 1e-8));
        const double min_b = *std::min_element(f500.residues.begin(), f500.residues.end());
        rows.push_back({"all b_n > 0", min_b > 0.0, min_b, 0.0});
        const double a1 = std::abs(f500.roots.front());
        const double u_half = 0.5 * a1;
        rows.push_back(detail::below("Mittag-Leffler vs G at 0.5 |a_1|",
                                     std::abs(mittag_leffler_eval(f500, u_half).value - big_g(ctx, u_half)), 1e-6));
        double fac = 0.0;
        for (double u : detail::linspace(-0.9 * std::min(a1, 1.0), 0.9 * std::min(a1, 1.0), 11))
            fac = std::max(fac, detail::rel_err(mgf_from_factors(f200, u), mgf_eval(u)));
        rows.push_back(detail::below("factored MGF relative error (n=200)", fac, 1e-4));

        if (full && p.v0 > 0) {
            double norm = 0.0, rec = 0.0;
            for (const auto& f : factors_of(f200, 5)) {
                norm = std::max(norm, std::abs(detail::factor_transform(f, 0.0) - 1.0));
                BesselFactor unshifted = f;
                unshifted.shift = 0.0;
                rec = std::max(rec, detail::rel_err(detail::factor_transform(f, 0.5 * std::abs(f.gamma)),
                                                    factor_mgf(unshifted, 0.5 * f.gamma)));
            }
            rows.push_back(detail::below("factor densities integrate to 1 (first 5)", norm, 1e-8));
            rows.push_back(detail::below("factor MGF recovery at gamma/2 (first 5)", rec, 1e-6));
        }
    }
    if (full) {
        McConfig mc;
        mc.paths = 200000;
        mc.steps_per_unit_time = 256;
        mc.seed = seed;
        std::vector<double> us;
        for (double u : {-0.5, 0.5, 1.0, 2.0})
            if (2.0 * u > dom.u_star_minus && 2.0 * u < dom.u_star_plus) us.push_back(u);
        for (const auto& e : mc_mgf(ctx, mc, us)) {
            const double z = std::abs(e.estimate - mgf_eval(e.u)) / e.se;
            rows.push_back(detail::below("MC vs M at u=" + std::to_string(e.u) + " (in SE)", z, 3.0));
        }
    }
    return rows;
}

} // namespace hestonlaw
