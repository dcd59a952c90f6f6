// Short tour of the library on a steep-skew parameter set.
#include <cstdio>

#include "hestonlaw/density.hpp"
#include "hestonlaw/factorize.hpp"
#include "hestonlaw/mgf.hpp"
#include "hestonlaw/wings.hpp"

int main() {
    using namespace hestonlaw;
    const EvalContext ctx(make_params(2.0, 0.0225, 0.8, -0.9, 1.0, 0.0225), Horizon{1.0});

    const auto dom = abscissae(ctx);
    std::printf("u_- = %.6f  u_+ = %.6f\n", dom.u_minus, dom.u_plus);
    std::printf("u*_- = %.6f  u*_+ = %.6f  (%s)\n", dom.u_star_minus, dom.u_star_plus, to_string(dom.case_label));

    const auto w = wing_report(ctx);
    std::printf("beta_R = %.6f  beta_L = %.6f\n", w.beta_R, w.beta_L);

    const MgfEvaluator m(ctx);
    for (double u : {-2.0, 0.5, 1.0, 10.0, 40.0}) std::printf("M(%5.1f) = %.10g\n", u, m(u));

    const auto fz = build_factorization(ctx, 200);
    std::printf("a_1 = %.6f  b_1 = %.6f  nu = %.10f  d = %.10f\n", fz.roots[0], fz.residues[0], fz.nu, fz.d_shift);
    std::printf("M(0.5) from 200 factors = %.10g\n", mgf_from_factors(fz, 0.5));
    return 0;
}
