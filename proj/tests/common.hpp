#pragma once

#include <cmath>
#include <vector>

#include "hestonlaw/charfn.hpp"

namespace testing {

// Steep-skew set used throughout: a=2, b=0.0225, c=0.8, rho=-0.9, t=1.
inline hestonlaw::EvalContext steep(double v0 = 0.0225, double t = 1.0) {
    return {hestonlaw::make_params(2.0, 0.0225, 0.8, -0.9, 1.0, v0), hestonlaw::Horizon{t}};
}

// Feller-satisfying desk set.
inline hestonlaw::EvalContext desk() {
    return {hestonlaw::make_params(2.0, 0.04, 0.3, -0.7, 1.0, 0.04), hestonlaw::Horizon{1.0}};
}

inline hestonlaw::EvalContext ctx(double a, double b, double c, double rho, double t = 1.0, double v0 = 0.04,
                                  double s0 = 1.0, double mu = 0.0) {
    return {hestonlaw::make_params(a, b, c, rho, s0, v0, mu), hestonlaw::Horizon{t}};
}

inline double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

} // namespace testing
