#include "pinchfl/flcore/convergence.hpp"

#include <cmath>

#include "pinchfl/errors.hpp"

namespace pinchfl::flcore {

using detail::require;

double eta_max(double L, double xi) {
    require(L > 0.0, "L must be positive");
    require(xi >= 1.0, "xi must be at least 1");
    return 1.0 / (L * (1.0 + 3.0 * xi));
}

double eta_max_stale(double L, double delta_max, double c0) {
    require(L > 0.0, "L must be positive");
    require(delta_max >= 0.0, "delta_max must be nonnegative");
    require(c0 > 0.0 && c0 <= 1.0, "c0 must lie in (0, 1]");
    return c0 / (L * (1.0 + delta_max));
}

ConvergenceReport convergence_constants(const ConvergenceInputs& in) {
    require(in.eta > 0.0, "eta must be positive");
    require(in.sigma2 >= 0.0 && in.delta2 >= 0.0 && in.G2 >= 0.0, "noise and bounds must be nonnegative");
    if (!in.quantizer.lossless) in.quantizer.validate();

    ConvergenceReport r;
    r.alpha = in.quantizer.alpha();
    if (!(r.alpha > 0.0)) throw ParameterError("quantizer fidelity must be positive");
    r.xi_safe = in.xi;
    r.eta_max = eta_max(in.L, in.xi);
    r.rho_b = (1.0 - r.alpha) * (1.0 + r.alpha / 2.0);
    r.c1 = 1.0 + 2.0 / r.alpha;

    const double eta2 = in.eta * in.eta;
    r.A_plus = 1.0 / in.L + 1.5 * in.L * eta2 * in.xi;
    r.lambda_min = r.A_plus * (1.0 + r.rho_b) / (1.0 - r.rho_b);
    const double noise = in.sigma2 + in.delta2;
    r.variance_floor = 1.5 * in.L * eta2 * in.xi * noise;
    r.variance_floor_avg = 3.0 * in.L * in.eta * in.xi * noise;
    const double inj = r.c1 * (1.0 - r.alpha) * (in.G2 + in.sigma2);
    r.ef_floor = (r.lambda_min + r.A_plus) * inj;
    r.ef_fixed_point = inj / (1.0 - r.rho_b);

    if (in.mu) {
        require(*in.mu > 0.0, "mu must be positive");
        const double em = in.eta * *in.mu;
        if (!(em < 1.0 - r.rho_b))
            throw OutOfRegimeError("PL rate needs eta * mu < 1 - rho_b");
        r.pl_rate = 1.0 - em;
        r.pl_lambda_min = r.A_plus * (1.0 + r.rho_b) / (1.0 - r.rho_b - em);
    }
    if (in.delta_max) r.eta_max_stale = eta_max_stale(in.L, *in.delta_max, in.c0);
    return r;
}

}  // namespace pinchfl::flcore
