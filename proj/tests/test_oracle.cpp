#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "common.hpp"
#include "hestonlaw/mgf.hpp"
#include "hestonlaw/oracle.hpp"

using namespace hestonlaw;
using Catch::Approx;

// b must stay positive, and once V leaves 0 the c sqrt(V dt) z term feeds on
// itself, so a few Euler paths drift. Most paths never move.
TEST_CASE("near-degenerate model keeps most paths at x0", "[oracle]") {
    const auto c = testing::ctx(1.0, 1e-300, 0.3, 0.2, 1.0, 0.0, 2.0);
    McConfig mc;
    mc.paths = 5000;
    const auto s = simulate_terminal(c, mc);
    const auto still = std::count(s.x.begin(), s.x.end(), std::log(2.0));
    REQUIRE(still > 4500);
    const auto e1 = sample_mean_exp(s.x, 1.0);
    REQUIRE(std::abs(e1.estimate - 2.0) < 3.0 * e1.se + 1e-12);
}

TEST_CASE("martingale and CIR mean", "[oracle]") {
    const auto c = testing::desk();
    McConfig mc;
    mc.paths = 1000000;
    mc.seed = 5;
    const auto s = simulate_terminal(c, mc);
    const auto e1 = sample_mean_exp(s.x, 1.0);
    REQUIRE(std::abs(e1.estimate - 1.0) < 3.0 * e1.se);

    double sum = 0.0, sum2 = 0.0;
    for (double v : s.v) {
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(s.v.size());
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    const double expected = 0.04 + (0.04 - 0.04) * std::exp(-2.0);
    REQUIRE(std::abs(mean - expected) < 3.0 * se);
}

TEST_CASE("CIR mean away from the long-run level", "[oracle]") {
    const auto c = testing::ctx(1.5, 0.04, 0.5, -0.7, 1.0, 0.09);
    McConfig mc;
    mc.paths = 400000;
    mc.seed = 8;
    const auto s = simulate_terminal(c, mc);
    double sum = 0.0, sum2 = 0.0;
    for (double v : s.v) {
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(s.v.size());
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    REQUIRE(std::abs(mean - (0.04 + 0.05 * std::exp(-1.5))) < 3.0 * se);
}

TEST_CASE("MC MGF estimates bracket the closed form", "[oracle]") {
    const auto c = testing::steep();
    McConfig mc;
    mc.paths = 1000000;
    mc.seed = 17;
    const auto est = mc_mgf(c, mc, {0.0, 0.5, 1.0});
    REQUIRE(est[0].estimate == 1.0);
    REQUIRE(est[0].se == 0.0);
    for (std::size_t i = 1; i < est.size(); ++i) REQUIRE(std::abs(est[i].estimate - mgf(c, est[i].u)) < 3.0 * est[i].se);
}

TEST_CASE("simulation is reproducible and thread-count independent", "[oracle]") {
    const auto c = testing::steep();
    McConfig mc;
    mc.paths = 3 * kPathsPerBlock + 17;
    mc.steps_per_unit_time = 32;
    mc.seed = 42;
    mc.threads = 1;
    const auto one = simulate_terminal(c, mc);
    mc.threads = 3;
    const auto three = simulate_terminal(c, mc);
    REQUIRE(one.x == three.x);
    REQUIRE(one.v == three.v);
    mc.seed = 43;
    REQUIRE(simulate_terminal(c, mc).x != one.x);
    REQUIRE(one.rng == std::string(kRngIdentity));
    REQUIRE(one.steps == 32);
}

TEST_CASE("invalid Monte Carlo configurations", "[oracle]") {
    McConfig mc;
    mc.paths = 0;
    REQUIRE_THROWS_AS(simulate_terminal(testing::steep(), mc), ValidationError);
    mc.paths = 10;
    mc.steps_per_unit_time = 4;
    REQUIRE_THROWS_AS(simulate_terminal(testing::steep(), mc), ValidationError);
}
