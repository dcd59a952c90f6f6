#include <catch2/catch_amalgamated.hpp>

#include "common.hpp"
#include "hestonlaw/io.hpp"
#include "hestonlaw/mgf.hpp"

using namespace hestonlaw;
using Catch::Approx;

TEST_CASE("canonicalize leaves positive c alone", "[params]") {
    const auto p = make_raw_params(2.0, 0.04, 0.8, -0.9);
    REQUIRE(canonicalize(p) == p);
}

TEST_CASE("canonicalize flips (c, rho) when c < 0", "[params]") {
    const auto p = canonicalize(make_raw_params(2.0, 0.04, -0.8, 0.9));
    REQUIRE(p.c == 0.8);
    REQUIRE(p.rho == -0.9);
    REQUIRE(p.a == 2.0);
}

TEST_CASE("validation names the offending field", "[params]") {
    auto field_of = [](auto&& fn) {
        try {
            fn();
        } catch (const ValidationError& e) {
            return e.field();
        }
        return std::string("none");
    };
    REQUIRE(field_of([] { make_params(2.0, 0.04, 0.0, 0.5); }) == "c");
    REQUIRE(field_of([] { make_params(-1.0, 0.04, 0.3, 0.5); }) == "a");
    REQUIRE(field_of([] { make_params(1.0, 0.0, 0.3, 0.5); }) == "b");
    REQUIRE(field_of([] { make_params(1.0, 0.04, 0.3, 1.5); }) == "rho");
    REQUIRE(field_of([] { make_params(1.0, 0.04, 0.3, 0.5, -1.0); }) == "s0");
    REQUIRE(field_of([] { make_params(1.0, 0.04, 0.3, 0.5, 1.0, -0.1); }) == "v0");
    REQUIRE(field_of([] { validate(Horizon{0.0}); }) == "t");
}

TEST_CASE("invert_model substitutes into the measure change", "[params]") {
    const auto q = invert_model(make_params(2.0, 0.04, 0.8, -0.9));
    REQUIRE(q.a == Approx(2.72).epsilon(1e-15));
    REQUIRE(q.b == Approx(2.0 * 0.04 / 2.72).epsilon(1e-15));
    REQUIRE(q.c == 0.8);
    REQUIRE(q.rho == 0.9);
    REQUIRE(q.s0 == 1.0);
    REQUIRE(q.mu == 0.0);
}

TEST_CASE("invert_model with rho = 0 only flips spot and drift", "[params]") {
    const auto p = make_params(1.3, 0.05, 0.4, 0.0, 2.0, 0.03, 0.1);
    const auto q = invert_model(p);
    REQUIRE(q.a == p.a);
    REQUIRE(q.b == p.b);
    REQUIRE(q.rho == 0.0);
    REQUIRE(q.s0 == 0.5);
    REQUIRE(q.x0 == -p.x0);
    REQUIRE(q.mu == -0.1);
}

TEST_CASE("invert_model rejects a <= c rho", "[params]") {
    REQUIRE_THROWS_AS(invert_model(make_params(0.5, 0.04, 1.0, 0.9)), DomainError);
}

TEST_CASE("rescale", "[params]") {
    const auto p = make_params(2.0, 0.04, 0.8, -0.9, 1.0, 0.03);
    const Horizon h{1.0};
    SECTION("lambda = 1 is the identity") {
        const auto [q, g] = rescale(p, h, 1.0);
        REQUIRE(q == p);
        REQUIRE(g == h);
    }
    SECTION("lambda = t/2 moves the horizon to 2") {
        const Horizon h3{3.7};
        REQUIRE(rescale(p, h3, h3.t / 2.0).second.t == 2.0);
    }
    SECTION("lambda = 2 doubles a, b, c, v0 and halves t") {
        const auto [q, g] = rescale(p, h, 2.0);
        REQUIRE(q.a == 4.0);
        REQUIRE(q.b == 0.08);
        REQUIRE(q.c == 1.6);
        REQUIRE(q.v0 == 0.06);
        REQUIRE(q.rho == p.rho);
        REQUIRE(q.x0 == p.x0);
        REQUIRE(g.t == 0.5);
    }
    SECTION("non-positive lambda is rejected") { REQUIRE_THROWS_AS(rescale(p, h, 0.0), DomainError); }
}

TEST_CASE("transforms preserve the law: MGF identities", "[params][property]") {
    for (double rho : {-0.95, -0.3, 0.0, 0.4, 0.9}) {
        const auto c = testing::ctx(1.7, 0.05, 0.9, rho, 1.3, 0.06, 1.4);
        const MgfEvaluator m(c);
        const auto& p = c.params;
        const EvalContext flipped(make_raw_params(p.a, p.b, -p.c, -p.rho, p.s0, p.v0, p.mu), c.horizon);
        for (double u : {-1.5, -0.4, 0.3, 0.8, 1.6}) {
            REQUIRE(m.inside(u));
            REQUIRE(testing::rel(std::exp(log_mgf_formula(flipped, u)), m(u)) < 1e-14);
            for (double lambda : {0.5, 2.0}) {
                const auto [q, g] = rescale(p, c.horizon, lambda);
                REQUIRE(testing::rel(mgf(EvalContext(q, g), u), m(u)) < 1e-12);
            }
            if (p.a > p.c * p.rho) {
                const MgfEvaluator inv(EvalContext(invert_model(p), c.horizon));
                REQUIRE(testing::rel(m(1.0 - u), std::exp(p.x0) * inv(u)) < 1e-10);
            }
        }
    }
}

TEST_CASE("params JSON round-trips and rejects unknown keys", "[params][io]") {
    const std::string text = R"({"a": 2, "b": 0.0225, "c": -0.8, "rho": 0.9, "s0": 1.5, "v0": 0.02, "mu": 0.01, "t": 2})";
    const auto pf = params_from_string(text);
    REQUIRE(pf.params.c == 0.8);
    REQUIRE(pf.params.rho == -0.9);
    const auto again = params_from_json(params_to_json(pf.params, pf.horizon));
    REQUIRE(again.params == pf.params);
    REQUIRE(again.horizon == pf.horizon);

    REQUIRE_THROWS_AS(params_from_string(R"({"a":2,"b":0.1,"c":0.3,"rho":0,"v0":0.1,"t":1,"kappa":1})"), ValidationError);
    REQUIRE_THROWS_AS(params_from_string(R"({"a":2,"b":0.1,"c":0.3,"rho":0,"v0":0.1})"), ValidationError);
    REQUIRE_THROWS_AS(params_from_string(R"({"a":"x","b":0.1,"c":0.3,"rho":0,"v0":0.1,"t":1})"), ValidationError);
    REQUIRE_THROWS_AS(params_from_string("{not json"), ValidationError);
}

TEST_CASE("infinities serialize as strings", "[io]") {
    REQUIRE(number(kInf) == json("inf"));
    REQUIRE(number(-kInf) == json("-inf"));
    REQUIRE(number(1.5) == json(1.5));
    REQUIRE(read_number(json("-inf"), "x") == -kInf);
}
