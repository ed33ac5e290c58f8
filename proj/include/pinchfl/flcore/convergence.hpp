#pragma once

// Constants of the one-step Lyapunov descent for gated, compressed SGD with
// error feedback: stepsize limits, EF contraction, floors and PL rates.

#include <optional>

#include "pinchfl/flcore/quantizer.hpp"

namespace pinchfl::flcore {

struct ConvergenceInputs {
    double L = 1.0;
    double eta = 0.1;
    double xi = 1.0;            // Xi_safe
    QuantizerSpec quantizer;
    double sigma2 = 0.0;        // gradient noise
    double delta2 = 0.0;        // heterogeneity
    double G2 = 0.0;            // gradient second-moment bound
    std::optional<double> mu;   // PL constant
    std::optional<double> delta_max;
    double c0 = 0.25;
};

struct ConvergenceReport {
    double alpha = 1.0;
    double xi_safe = 1.0;
    double eta_max = 0.0;
    double rho_b = 0.0;
    double c1 = 1.0;
    double A_plus = 0.0;
    double lambda_min = 0.0;
    double variance_floor = 0.0;       // per step
    double variance_floor_avg = 0.0;   // in the time-averaged gradient bound
    double ef_floor = 0.0;
    double ef_fixed_point = 0.0;       // c1 (1 - alpha)(G2 + sigma2) / (1 - rho_b)
    std::optional<double> pl_rate;
    std::optional<double> pl_lambda_min;
    std::optional<double> eta_max_stale;
};

// Throws OutOfRegimeError when eta mu >= 1 - rho_b.
ConvergenceReport convergence_constants(const ConvergenceInputs& in);

// 1 / (L (1 + 3 xi))
double eta_max(double L, double xi);

// c0 / (L (1 + delta_max))
double eta_max_stale(double L, double delta_max, double c0 = 0.25);

}  // namespace pinchfl::flcore
