#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "charfn.hpp"
#include "errors.hpp"
#include "factorize.hpp"
#include "special.hpp"

namespace hestonlaw {

// Law with MGF e^{shift u} (1 - u/gamma)^{-xi} exp(zeta u / (1 - u/gamma)),
// supported on shift + sign(gamma) * [0, inf).
struct BesselFactor {
    double xi = 1.0;
    double gamma = 1.0;
    double zeta = 0.0;
    double tau = 0.0;  // (xi - 1) / 2
    double shift = 0.0;
};

inline BesselFactor make_factor(double xi, double gamma, double zeta, double shift = 0.0) {
    if (!(xi > 0) || !std::isfinite(xi)) throw ValidationError("xi", "must be > 0");
    if (gamma == 0 || !std::isfinite(gamma)) throw ValidationError("gamma", "must be finite and nonzero");
    if (!(zeta * gamma > 0 || zeta == 0)) throw ValidationError("zeta", "must share the sign of gamma (or be 0)");
    return {xi, gamma, zeta, 0.5 * (xi - 1.0), shift};
}

inline std::vector<BesselFactor> factors_of(const Factorization& fz, int n) {
    std::vector<BesselFactor> out;
    for (int i = 0; i < n && i < fz.n_terms; ++i)
        out.push_back(make_factor(fz.xi, fz.roots[i], fz.g_coef[i], fz.c_shift[i]));
    return out;
}

inline double factor_mean(const BesselFactor& f) { return f.shift + f.xi / f.gamma + f.zeta; }
inline double factor_variance(const BesselFactor& f) { return f.xi / (f.gamma * f.gamma) + 2.0 * f.zeta / f.gamma; }

// log of the unshifted density; -inf off the support.
//   h(x) = |gamma| (x/zeta)^tau exp(-gamma (x + zeta)) I_{2 tau}(2 |gamma| sqrt(zeta x)),
// which is a Poisson(zeta gamma) mixture of Gamma(xi + K, |gamma|) laws; the
// zeta = 0 limit is the Gamma(xi, |gamma|) density.
inline double factor_log_density(const BesselFactor& f, double x) {
    const double y = (f.gamma > 0) ? x : -x;
    if (!(y > 0)) return -kInf;
    const double g = std::abs(f.gamma);
    const double z = std::abs(f.zeta);
    if (z == 0.0) return f.xi * std::log(g) + (f.xi - 1.0) * std::log(y) - g * y - log_gamma(f.xi);
    const double arg = 2.0 * g * std::sqrt(z * y);
    return std::log(g) + f.tau * (std::log(y) - std::log(z)) - g * (y + z) + log_bessel_i(2.0 * f.tau, arg);
}

inline double factor_density(const BesselFactor& f, double x) { return std::exp(factor_log_density(f, x)); }

// Factor MGF including the shift; +inf outside the factor's own domain.
inline double factor_mgf(const BesselFactor& f, double u) {
    const double w = 1.0 - u / f.gamma;
    if (!(w > 0)) return kInf;
    return std::exp(f.shift * u - f.xi * std::log(w) + f.zeta * u / w);
}

struct GridSpec {
    double xmin = -1.0;
    double xmax = 1.0;
    int npts = 201;

    double h() const { return (xmax - xmin) / (npts - 1); }
};

inline void validate(const GridSpec& g) {
    if (!std::isfinite(g.xmin) || !std::isfinite(g.xmax) || !(g.xmax > g.xmin))
        throw ValidationError("grid", "need finite xmin < xmax");
    if (g.npts < 2) throw ValidationError("grid", "need at least 2 points");
}

// Tabulated density on x0_grid + i h. `mass` is the trapezoidal integral of
// `values` as tabulated (before any renormalization).
struct DensityGrid {
    double x0_grid = 0.0;
    double h = 1.0;
    std::vector<double> values;
    double mass = 0.0;
    std::vector<std::string> warnings;

    double x_at(std::size_t i) const { return x0_grid + h * static_cast<double>(i); }
};

inline double trapezoid(const std::vector<double>& v, double h) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return h * (s - 0.5 * (v.front() + v.back()));
}

inline double grid_mean(const DensityGrid& g) {
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        const double w = (i == 0 || i + 1 == g.values.size()) ? 0.5 : 1.0;
        m0 += w * g.values[i];
        m1 += w * g.values[i] * g.x_at(i);
    }
    return m1 / m0;
}

inline double grid_variance(const DensityGrid& g) {
    const double mean = grid_mean(g);
    double m0 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        const double w = (i == 0 || i + 1 == g.values.size()) ? 0.5 : 1.0;
        const double dx = g.x_at(i) - mean;
        m0 += w * g.values[i];
        m2 += w * g.values[i] * dx * dx;
    }
    return m2 / m0;
}

namespace detail {

inline void check_same_grid(const DensityGrid& a, const DensityGrid& b) {
    if (std::abs(a.h - b.h) > 1e-12 * a.h || a.values.size() != b.values.size() ||
        std::abs(a.x0_grid - b.x0_grid) > 1e-9 * a.h)
        throw GridError("density grids differ");
}

// Full Gauss-Legendre rule on [-1, 1] from Boost's positive half.
struct GaussRule {
    std::vector<double> x, w;
};

inline const GaussRule& gauss20() {
    static const GaussRule rule = [] {
        using G = boost::math::quadrature::gauss<double, 20>;
        GaussRule r;
        const auto& ab = G::abscissa();
        const auto& wt = G::weights();
        for (std::size_t i = 0; i < ab.size(); ++i) {
            if (ab[i] == 0.0) {
                r.x.push_back(0.0);
                r.w.push_back(wt[i]);
                continue;
            }
            r.x.push_back(ab[i]);
            r.w.push_back(wt[i]);
            r.x.push_back(-ab[i]);
            r.w.push_back(wt[i]);
        }
        return r;
    }();
    return rule;
}

inline std::vector<double> convolve_masses(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ai = a[i];
        if (ai == 0.0) continue;
        double* o = out.data() + i;
        for (std::size_t j = 0; j < b.size(); ++j) o[j] += ai * b[j];
    }
    return out;
}

} // namespace detail

inline double l1_distance(const DensityGrid& a, const DensityGrid& b) {
    detail::check_same_grid(a, b);
    std::vector<double> diff(a.values.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = std::abs(a.values[i] - b.values[i]);
    return trapezoid(diff, a.h);
}

// max |CDF_a - CDF_b| with CDFs from cumulative trapezoid sums.
inline double cdf_distance(const DensityGrid& a, const DensityGrid& b) {
    detail::check_same_grid(a, b);
    double ca = 0.0, cb = 0.0, worst = 0.0;
    for (std::size_t i = 1; i < a.values.size(); ++i) {
        ca += 0.5 * a.h * (a.values[i - 1] + a.values[i]);
        cb += 0.5 * a.h * (b.values[i - 1] + b.values[i]);
        worst = std::max(worst, std::abs(ca - cb));
    }
    return worst;
}

// Linear convolution of densities on a common spacing: (f * g)(x_k) = h sum_i f_i g_{k-i}.
inline DensityGrid convolve(const std::vector<DensityGrid>& gs) {
    if (gs.empty()) throw GridError("convolve: empty list");
    DensityGrid acc = gs.front();
    for (std::size_t k = 1; k < gs.size(); ++k) {
        const auto& g = gs[k];
        if (std::abs(g.h - acc.h) > 1e-12 * acc.h) throw GridError("convolve: grids have different spacing");
        if (g.values.empty() || acc.values.empty()) throw GridError("convolve: empty grid");
        auto out = detail::convolve_masses(acc.values, g.values);
        for (double& v : out) v *= acc.h;
        acc.values = std::move(out);
        acc.x0_grid += g.x0_grid;
        acc.warnings.insert(acc.warnings.end(), g.warnings.begin(), g.warnings.end());
    }
    acc.mass = trapezoid(acc.values, acc.h);
    return acc;
}

// Discretizes the unshifted factor onto the lattice {j h}: exact cell masses
// and first moments (20-point Gauss-Legendre per cell; the first cell uses
// x = h v^{1/xi} when xi < 1 to absorb the x^{xi-1} singularity) are split
// linearly between the two cell nodes, so mass and mean are preserved.
// Returns masses normalized to 1 and the pre-normalization mass.
struct FactorLattice {
    long first_index = 0;  // node index of masses[0]
    std::vector<double> masses;
    double raw_mass = 0.0;
};

inline FactorLattice factor_lattice(const BesselFactor& f, double h) {
    if (!(h > 0)) throw GridError("factor_lattice: spacing must be > 0");
    const double g = std::abs(f.gamma);
    const double z = std::abs(f.zeta);
    const double mean = f.xi / g + z;
    const double sd = std::sqrt(f.xi / (g * g) + 2.0 * z / g);
    const double reach = mean + 14.0 * sd + 40.0 / g;
    const long cells = std::max<long>(2, static_cast<long>(std::ceil(reach / h)));

    BesselFactor pos = f;
    pos.gamma = g;
    pos.zeta = z;
    const auto& rule = detail::gauss20();
    std::vector<double> m(cells + 1, 0.0);
    double total = 0.0;
    for (long j = 0; j < cells; ++j) {
        const double left = j * h;
        double mass = 0.0, moment = 0.0;  // moment about the left node
        if (j == 0 && f.xi < 1.0) {
            for (std::size_t k = 0; k < rule.x.size(); ++k) {
                const double v = 0.5 * (rule.x[k] + 1.0);
                const double y = h * std::pow(v, 1.0 / f.xi);
                const double jac = (h / f.xi) * std::pow(v, 1.0 / f.xi - 1.0);
                // density * jacobian, combined in logs so y^{xi-1} v^{1/xi-1} cancels cleanly
                const double w = 0.5 * rule.w[k] * std::exp(factor_log_density(pos, y) + std::log(jac));
                mass += w;
                moment += w * y;
            }
        } else {
            for (std::size_t k = 0; k < rule.x.size(); ++k) {
                const double s = 0.5 * h * (rule.x[k] + 1.0);
                const double w = 0.5 * h * rule.w[k] * factor_density(pos, left + s);
                mass += w;
                moment += w * s;
            }
        }
        if (mass <= 0.0) continue;
        const double frac = std::clamp(moment / (mass * h), 0.0, 1.0);
        m[j] += mass * (1.0 - frac);
        m[j + 1] += mass * frac;
        total += mass;
    }
    FactorLattice out;
    out.raw_mass = total;
    for (double& v : m) v /= total;
    if (f.gamma < 0) {
        std::reverse(m.begin(), m.end());
        out.first_index = -cells;
    }
    out.masses = std::move(m);
    return out;
}

// Grid spacing each factor would ask for: 200 points across +-8 sd.
inline double factor_policy_spacing(const BesselFactor& f) { return 16.0 * std::sqrt(factor_variance(f)) / 200.0; }

inline constexpr std::size_t kMaxLatticePoints = 1u << 16;

// Law of sum_{j <= n} W_j + d(t), where W_j has MGF N_j: the product of the
// first n factor MGFs equals M(u) e^{-d u} in the limit, so the convolution
// is shifted by +d to approximate the law of X_t itself.
inline DensityGrid approx_law(const EvalContext& ctx, const Factorization& fz, int n_factors, const GridSpec& spec) {
    validate(spec);
    (void)ctx;
    if (n_factors < 1 || n_factors > fz.n_terms)
        throw ValidationError("n_factors", "must lie in [1, n_terms] = [1, " + std::to_string(fz.n_terms) + "]");
    const auto factors = factors_of(fz, n_factors);
    const double h_out = spec.h();

    double h_lat = h_out;
    double width = 0.0;
    for (const auto& f : factors) {
        h_lat = std::min(h_lat, factor_policy_spacing(f));
        width += std::abs(factor_mean(f) - f.shift) + 14.0 * std::sqrt(factor_variance(f)) + 40.0 / std::abs(f.gamma);
    }
    std::vector<std::string> warnings;
    if (width / h_lat > static_cast<double>(kMaxLatticePoints)) {
        h_lat = width / static_cast<double>(kMaxLatticePoints);
        warnings.push_back("lattice spacing capped at " + std::to_string(h_lat) + " to bound the lattice size");
    }
    // keep the lattice commensurate with the output grid
    const double ratio = std::max(1.0, std::ceil(h_out / h_lat - 1e-9));
    h_lat = h_out / ratio;

    std::vector<double> acc{1.0};
    long first = 0;
    double shift = fz.d_shift;
    for (const auto& f : factors) {
        const auto lat = factor_lattice(f, h_lat);
        acc = detail::convolve_masses(acc, lat.masses);
        first += lat.first_index;
        shift += f.shift;
        if (std::abs(lat.raw_mass - 1.0) > 1e-6)
            warnings.push_back("factor mass before normalization " + std::to_string(lat.raw_mass));
    }

    DensityGrid out;
    out.x0_grid = spec.xmin;
    out.h = h_out;
    out.values.assign(spec.npts, 0.0);
    const double origin = shift + static_cast<double>(first) * h_lat;
    for (int i = 0; i < spec.npts; ++i) {
        const double pos = (spec.xmin + i * h_out - origin) / h_lat;
        if (pos < 0 || pos > static_cast<double>(acc.size() - 1)) continue;
        const auto k = static_cast<std::size_t>(std::floor(pos));
        const double w = pos - static_cast<double>(k);
        const double lo = acc[k];
        const double hi = (k + 1 < acc.size()) ? acc[k + 1] : 0.0;
        out.values[i] = ((1.0 - w) * lo + w * hi) / h_lat;
    }
    out.mass = trapezoid(out.values, h_out);
    out.warnings = std::move(warnings);
    return out;
}

// f(x) = (1/pi) int_0^U Re[e^{-iux} phi(u)] du with U such that |phi(U)| < 1e-10;
// composite 20-point Gauss-Legendre on panels short enough to follow
// e^{-iux} across the grid. A half-width rerun at a few points estimates the
// quadrature error.
inline DensityGrid reference_density(const EvalContext& ctx, const GridSpec& spec) {
    validate(spec);
    DensityGrid out;
    out.x0_grid = spec.xmin;
    out.h = spec.h();

    const double log_cut = std::log(1e-10);
    constexpr double kUCap = 1e4;
    double upper = 0.0;
    {
        LogFTracker tracker(ctx);
        int below = 0;
        for (double u = 1.0; u <= kUCap; u += 1.0) {
            const double lp = detail::log_charfn_from_parts(ctx, u, tracker.advance(u)).real();
            below = (lp < log_cut) ? below + 1 : 0;
            upper = u;
            if (below >= 3) break;
        }
        if (below < 3) out.warnings.push_back("characteristic function above 1e-10 at the integration cap");
    }

    const double span = std::max(std::abs(spec.xmin), std::abs(spec.xmax)) + 1.0;
    auto integrate = [&](double panel, const std::vector<double>& xs) {
        const auto& rule = detail::gauss20();
        const int panels = static_cast<int>(std::ceil(upper / panel));
        const double width = upper / panels;
        std::vector<double> us;
        std::vector<double> ws;
        for (int p = 0; p < panels; ++p)
            for (std::size_t k = 0; k < rule.x.size(); ++k) {
                us.push_back(width * (p + 0.5 * (rule.x[k] + 1.0)));
                ws.push_back(0.5 * width * rule.w[k]);
            }
        // nodes within a panel are not monotone; the tracker handles any order
        const auto lphi = log_charfn_new_grid(ctx, us);
        std::vector<cplx> phi(lphi.size());
        for (std::size_t k = 0; k < phi.size(); ++k) phi[k] = ws[k] * std::exp(lphi[k]);
        std::vector<double> f(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < us.size(); ++k) {
                const double ang = us[k] * xs[i];
                s += phi[k].real() * std::cos(ang) + phi[k].imag() * std::sin(ang);
            }
            f[i] = s / std::numbers::pi;
        }
        return f;
    };

    const double panel = std::min(0.5, 2.0 / span);
    std::vector<double> xs(spec.npts);
    for (int i = 0; i < spec.npts; ++i) xs[i] = spec.xmin + i * out.h;
    auto values = integrate(panel, xs);

    std::vector<std::size_t> probe_idx;
    std::vector<double> probe;
    for (int i = 0; i < 9; ++i) {
        probe_idx.push_back((static_cast<std::size_t>(spec.npts - 1) * i) / 8);
        probe.push_back(xs[probe_idx.back()]);
    }
    const auto fine = integrate(0.5 * panel, probe);
    double err = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i) err = std::max(err, std::abs(values[probe_idx[i]] - fine[i]));
    if (err > 1e-8) out.warnings.push_back("quadrature refinement changed values by " + std::to_string(err));

    double lowest = 0.0;
    for (double& v : values) {
        lowest = std::min(lowest, v);
        v = std::max(v, 0.0);
    }
    if (lowest < -1e-8) out.warnings.push_back("negative reference values down to " + std::to_string(lowest));
    out.values = std::move(values);
    out.mass = trapezoid(out.values, out.h);
    return out;
}

} // namespace hestonlaw
