#pragma once

#include <cmath>
#include <functional>
#include <numbers>

namespace pinchfl::numerics {

// Adaptive Gauss-Kronrod (15-point) on [a, b] to the given absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-10);

// Standard normal CDF through erfc; accurate in both tails.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace pinchfl::numerics
