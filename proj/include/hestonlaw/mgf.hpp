#pragma once

#include <cmath>

#include "charfn.hpp"
#include "domain.hpp"

namespace hestonlaw {

// M(u) = E[exp(u X_t)] with the domain computed once and cached. Values at
// or beyond an abscissa are reported as +inf (the explosion marker).
class MgfEvaluator {
public:
    explicit MgfEvaluator(const EvalContext& ctx) : ctx_(ctx), domain_(abscissae(ctx)) {}
    MgfEvaluator(const EvalContext& ctx, const DomainReport& domain) : ctx_(ctx), domain_(domain) {}

    const DomainReport& domain() const { return domain_; }
    const EvalContext& context() const { return ctx_; }

    bool inside(double u) const { return u > domain_.u_star_minus && u < domain_.u_star_plus; }

    double log_value(double u) const {
        if (u == 0.0) return 0.0;
        if (!inside(u)) return kInf;
        const double v = log_mgf_formula(ctx_, u);
        if (std::isnan(v))
            throw ConsistencyError("mgf: F(u) <= 0 strictly inside the computed domain at u = " + std::to_string(u));
        return v;
    }

    double operator()(double u) const { return std::exp(log_value(u)); }

private:
    EvalContext ctx_;
    DomainReport domain_;
};

inline double mgf(const EvalContext& ctx, double u) { return MgfEvaluator(ctx)(u); }

} // namespace hestonlaw
