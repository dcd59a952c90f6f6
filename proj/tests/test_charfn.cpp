#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <complex>

#include <boost/numeric/odeint.hpp>

#include "common.hpp"
#include "hestonlaw/mgf.hpp"

using namespace hestonlaw;
using Catch::Approx;

namespace {

// Independent oracle: log E[exp(z X_t)] from the Riccati system
//   B' = (z^2 - z)/2 - (a - rho c z) B + c^2 B^2 / 2,   A' = a b B,
// integrated numerically for complex z; log M = x0 z + A(t) + v0 B(t).
cplx riccati_log_mgf(const EvalContext& ctx, cplx z) {
    using state = std::array<double, 4>;  // Re B, Im B, Re A, Im A
    const auto& m = ctx.params;
    auto rhs = [&](const state& s, state& ds, double) {
        const cplx b(s[0], s[1]);
        const cplx db = 0.5 * (z * z - z) - (m.a - m.rho * m.c * z) * b + 0.5 * m.c * m.c * b * b;
        const cplx da = m.a * m.b * b;
        ds = {db.real(), db.imag(), da.real(), da.imag()};
    };
    state s{0.0, 0.0, 0.0, 0.0};
    namespace ode = boost::numeric::odeint;
    ode::integrate_adaptive(ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<state>()), rhs, s, 0.0,
                            ctx.t(), 1e-3);
    return m.x0 * z + cplx(s[2], s[3]) + m.v0 * cplx(s[0], s[1]);
}

} // namespace

TEST_CASE("p(u) spot values", "[charfn]") {
    const auto c = testing::steep();
    REQUIRE(p_quadratic(c, 0.0) == Approx(4.0).epsilon(1e-15));
    REQUIRE(p_quadratic(c, 1.0) == Approx(std::pow(2.0 + 0.9 * 0.8, 2)).epsilon(1e-15));
    REQUIRE(p_quadratic(c, 10.0) == Approx(27.04).epsilon(1e-14));
}

TEST_CASE("F at u = 0 and u = 1", "[charfn]") {
    for (double t : {0.3, 1.0, 7.0, 40.0}) {
        const auto c = testing::steep(0.0225, t);
        REQUIRE(big_f(c, 0.0) == Approx(std::exp(2.0 * t / 2.0)).epsilon(1e-13));
        REQUIRE(big_f(c, 1.0) == Approx(std::exp((2.0 + 0.72) * t / 2.0)).epsilon(1e-13));
    }
}

TEST_CASE("F against the hyperbolic and trigonometric composites", "[charfn][oracle]") {
    const auto c = testing::steep();
    for (double u : {-5.0, -1.0, 0.3, 5.0, 30.0, 36.0, 40.0, 60.0}) {
        const double p = p_quadratic(c, u);
        const double k = kappa_term(c, u);
        const double s = std::sqrt(std::abs(p)) * c.t() / 2.0;
        const double ref = p >= 0 ? std::cosh(s) + k * (c.t() / 2.0) * std::sinh(s) / s
                                  : std::cos(s) + k * (c.t() / 2.0) * std::sin(s) / s;
        INFO("u=" << u);
        REQUIRE(big_f(c, u) == Approx(ref).epsilon(1e-12).margin(1e-12));
    }
}

TEST_CASE("F changes sign across the right abscissa", "[charfn]") {
    const auto c = testing::steep();
    REQUIRE(big_f(c, 37.42) > 0.0);
    REQUIRE(big_f(c, 37.44) < 0.0);
}

TEST_CASE("G spot values and pole", "[charfn]") {
    const auto c = testing::steep();
    REQUIRE(big_g(c, 0.0) == Approx(-std::expm1(-2.0) / 4.0).epsilon(1e-14));
    REQUIRE(big_g(c, 0.0) == Approx(0.2161661792).epsilon(1e-9));
    REQUIRE(big_g(c, 1.0) == 0.0);
    const double root = abscissae(c).u_star_plus;
    REQUIRE_THROWS_AS(big_g(c, root), PoleError);
}

TEST_CASE("MGF normalization and martingale property", "[charfn][mgf]") {
    for (double s0 : {0.5, 1.0, 3.0}) {
        const auto c = testing::ctx(1.2, 0.05, 0.6, -0.4, 2.0, 0.07, s0);
        REQUIRE(mgf(c, 0.0) == 1.0);
        REQUIRE(mgf(c, 1.0) == Approx(s0).epsilon(1e-13));
    }
}

TEST_CASE("MGF agrees with the Riccati system", "[charfn][mgf][oracle]") {
    const std::vector<EvalContext> sets = {testing::steep(), testing::desk(), testing::ctx(0.5, 0.09, 1.0, 0.5, 2.0, 0.05),
                                           testing::ctx(3.0, 0.02, 1.5, 0.3, 0.25, 0.2, 1.7)};
    for (const auto& c : sets) {
        const MgfEvaluator m(c);
        for (double u : testing::linspace(std::max(-5.0, 0.9 * m.domain().u_star_minus),
                                          std::min(8.0, 0.9 * m.domain().u_star_plus), 9)) {
            INFO("a=" << c.params.a << " u=" << u);
            REQUIRE(m.log_value(u) == Approx(riccati_log_mgf(c, u).real()).margin(1e-9));
        }
    }
}

TEST_CASE("MGF in the scaled regime (large P t)", "[charfn][mgf][oracle]") {
    const auto c = testing::steep(0.0225, 30.0);
    const MgfEvaluator m(c);
    for (double u : {-0.5, 0.5, 5.0, 25.0}) REQUIRE(m.log_value(u) == Approx(riccati_log_mgf(c, u).real()).epsilon(1e-9));
}

TEST_CASE("MGF reports explosion at and beyond the abscissae", "[charfn][mgf]") {
    const MgfEvaluator m(testing::steep());
    const auto& d = m.domain();
    REQUIRE(std::isinf(m(d.u_star_plus)));
    REQUIRE(std::isinf(m(d.u_star_plus + 0.01)));
    REQUIRE(std::isinf(m(d.u_star_minus - 0.01)));
    REQUIRE(std::isfinite(m(d.u_star_plus - 0.01)));
}

TEST_CASE("MGF is convex and positive inside the domain", "[charfn][mgf][property]") {
    const MgfEvaluator m(testing::steep());
    const auto us = testing::linspace(-3.0, 37.0, 401);
    for (std::size_t i = 1; i + 1 < us.size(); ++i) {
        REQUIRE(m(us[i]) > 0.0);
        REQUIRE(m(us[i - 1]) - 2.0 * m(us[i]) + m(us[i + 1]) >= -1e-10 * m(us[i]));
    }
}

TEST_CASE("characteristic function basic properties", "[charfn]") {
    const auto c = testing::steep();
    REQUIRE(std::abs(charfn_new(c, 0.0) - cplx(1.0, 0.0)) < 1e-15);
    REQUIRE(std::abs(charfn_albrecher(c, 0.0) - cplx(1.0, 0.0)) < 1e-15);
    REQUIRE(std::abs(charfn_new(c, -3.7) - std::conj(charfn_new(c, 3.7))) < 1e-15);
    REQUIRE(log_relative_difference(log_charfn_new(c, 10.0), log_charfn_albrecher(c, 10.0)) < 1e-10);
    for (double u : testing::linspace(-100.0, 100.0, 201)) REQUIRE(std::abs(charfn_new(c, u)) <= 1.0 + 1e-12);
}

TEST_CASE("characteristic function against the Riccati system", "[charfn][oracle]") {
    const auto c = testing::ctx(1.5, 0.04, 0.5, -0.7, 2.0, 0.04, 1.3);
    for (double u : {0.5, 3.7, 10.0, 25.0}) {
        const cplx ref = riccati_log_mgf(c, cplx(0.0, u));
        REQUIRE(log_relative_difference(log_charfn_new(c, u), ref) < 1e-8);
    }
}

TEST_CASE("characteristic function of a near-deterministic law", "[charfn]") {
    const auto c = testing::ctx(1.0, 1e-14, 0.3, 0.2, 1.0, 0.0, 2.5);
    for (double u : {0.7, 5.0, 40.0}) {
        REQUIRE(std::abs(charfn_new(c, u) - std::exp(cplx(0.0, std::log(2.5) * u))) < 1e-10);
        REQUIRE(std::abs(charfn_albrecher(c, u) - std::exp(cplx(0.0, std::log(2.5) * u))) < 1e-10);
    }
}

TEST_CASE("tracked branch stays continuous where the principal log jumps", "[charfn]") {
    // large xi with long horizon: arg F(iu) winds several times
    const auto c = testing::ctx(4.0, 0.2, 0.5, -0.3, 10.0, 0.1);
    const auto us = testing::linspace(0.0, 100.0, 2001);
    const auto logs = log_charfn_new_grid(c, us);
    for (std::size_t i = 1; i < logs.size(); ++i) REQUIRE(std::abs(logs[i].imag() - logs[i - 1].imag()) < 1.0);
    for (std::size_t i = 0; i < us.size(); i += 50)
        REQUIRE(log_relative_difference(logs[i], log_charfn_albrecher(c, us[i])) < 1e-10);
}

TEST_CASE("grid evaluation matches pointwise evaluation in any order", "[charfn]") {
    const auto c = testing::steep();
    const std::vector<double> us = {50.0, -20.0, 3.0, 90.0, 0.0};
    const auto grid = log_charfn_new_grid(c, us);
    for (std::size_t i = 0; i < us.size(); ++i) REQUIRE(log_relative_difference(grid[i], log_charfn_new(c, us[i])) < 1e-13);
}
