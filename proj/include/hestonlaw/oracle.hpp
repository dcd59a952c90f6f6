#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "charfn.hpp"
#include "errors.hpp"

namespace hestonlaw {

enum class McScheme { full_truncation_euler };

struct McConfig {
    long paths = 100000;
    int steps_per_unit_time = 256;
    std::uint64_t seed = 20240611;
    McScheme scheme = McScheme::full_truncation_euler;
    unsigned threads = 0;  // 0: hardware concurrency; results do not depend on it
};

inline void validate(const McConfig& mc) {
    if (mc.paths < 1) throw ValidationError("paths", "must be >= 1");
    if (mc.steps_per_unit_time < 16) throw ValidationError("steps", "steps per unit time must be >= 16");
}

inline constexpr const char* kRngIdentity = "mt19937_64+splitmix64-blocks+boost-ziggurat/1";
inline constexpr long kPathsPerBlock = 4096;

struct TerminalSamples {
    std::vector<double> x;  // X_t = log S_t - mu t
    std::vector<double> v;  // V_t
    int steps = 0;
    std::string rng = kRngIdentity;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
    return splitmix64(splitmix64(seed) ^ splitmix64(block + 0x632BE59BD9B4E019ull));
}

} // namespace detail

// Full-truncation Euler for (X, V):
//   X += -V+ dt / 2 + sqrt(V+ dt) (rho z1 + sqrt(1 - rho^2) z2)
//   V += a (b - V+) dt + c sqrt(V+ dt) z1,   V+ = max(V, 0).
// Paths are grouped in blocks of 4096 with one generator per block, so the
// output is identical for any thread count.
inline TerminalSamples simulate_terminal(const EvalContext& ctx, const McConfig& mc) {
    validate(mc);
    const auto& m = ctx.params;
    const double t = ctx.t();
    TerminalSamples out;
    out.steps = std::max(1, static_cast<int>(std::ceil(mc.steps_per_unit_time * t - 1e-9)));
    out.x.assign(mc.paths, 0.0);
    out.v.assign(mc.paths, 0.0);
    const double dt = t / out.steps;
    const double sqdt = std::sqrt(dt);
    const double rho_bar = std::sqrt(std::max(0.0, 1.0 - m.rho * m.rho));
    const long blocks = (mc.paths + kPathsPerBlock - 1) / kPathsPerBlock;

    auto run_block = [&](long blk) {
        std::mt19937_64 eng(detail::block_seed(mc.seed, static_cast<std::uint64_t>(blk)));
        boost::random::normal_distribution<double> normal;
        const long lo = blk * kPathsPerBlock;
        const long hi = std::min(mc.paths, lo + kPathsPerBlock);
        for (long i = lo; i < hi; ++i) {
            double x = m.x0;
            double v = m.v0;
            for (int s = 0; s < out.steps; ++s) {
                const double z1 = normal(eng);
                const double z2 = normal(eng);
                const double vp = v > 0 ? v : 0.0;
                const double sv = std::sqrt(vp) * sqdt;
                x += -0.5 * vp * dt + sv * (m.rho * z1 + rho_bar * z2);
                v += m.a * (m.b - vp) * dt + m.c * sv * z1;
            }
            out.x[i] = x;
            out.v[i] = v;
        }
    };

    unsigned workers = mc.threads ? mc.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<long>(workers, blocks));
    if (workers <= 1) {
        for (long b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (long b = w; b < blocks; b += workers) run_block(b);
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

struct McEstimate {
    double u;
    double estimate;
    double se;  // sample standard deviation / sqrt(paths)
};

inline McEstimate sample_mean_exp(const std::vector<double>& x, double u) {
    if (u == 0.0) return {u, 1.0, 0.0};
    const double n = static_cast<double>(x.size());
    // shift by the sample max of u*x for stability; summed in path order
    double shift = -kInf;
    for (double xi : x) shift = std::max(shift, u * xi);
    double s1 = 0.0, s2 = 0.0;
    for (double xi : x) {
        const double e = std::exp(u * xi - shift);
        s1 += e;
        s2 += e * e;
    }
    const double mean = s1 / n;
    const double var = std::max(0.0, s2 / n - mean * mean) * n / std::max(1.0, n - 1.0);
    const double scale = std::exp(shift);
    return {u, mean * scale, std::sqrt(var / n) * scale};
}

inline std::vector<McEstimate> mc_mgf(const TerminalSamples& samples, const std::vector<double>& u_list) {
    std::vector<McEstimate> out;
    for (double u : u_list) out.push_back(sample_mean_exp(samples.x, u));
    return out;
}

inline std::vector<McEstimate> mc_mgf(const EvalContext& ctx, const McConfig& mc, const std::vector<double>& u_list) {
    return mc_mgf(simulate_terminal(ctx, mc), u_list);
}

} // namespace hestonlaw
