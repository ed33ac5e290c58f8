#pragma once

// Closed-form moments, bounds and tail inequalities for straggler offsets on
// a uniform corridor.

#include <cstddef>

namespace pinchfl::analytics {

struct StragglerMomentReport {
    double conv_E2 = 0.0;      // E[Y_[M]^2]                      (m^2)
    double pa_ub_avg = 0.0;    // (D^2/4) (m/(K-m))^2             (m^2)
    double pa_ub_beta = 0.0;   // (D^2/4) m(m+1)/((K+1)(K+2))     (m^2)
    double pa_ub = 0.0;        // min of the two upper bounds     (m^2)
    double pa_lb = 0.0;        // (D^2/4) m^2 2/((K+1)^3 (K+2))   (m^2)
    double ratio_limit = 0.0;  // m^2/(M(M+1)), large-K PA/CONV ratio
};

struct MomentPair {
    double mean = 0.0;
    double second = 0.0;
};

struct TailBounds {
    double kl_lower_tail = 0.0;        // P(Y~ <= p - eps)
    double kl_upper_tail = 0.0;        // P(Y~ >= p + eps)
    double hoeffding_two_sided = 0.0;  // P(|Y~ - p| >= eps)
};

// m = M - 1 throughout.
StragglerMomentReport straggler_moments(std::size_t K, std::size_t M, double D);

// Beta(M, K+1-M) moments of the normalized M-th order statistic.
MomentPair order_stat_moments(std::size_t K, std::size_t M);

// Moments of a normalized m-span, Beta(m, K+1-m).
MomentPair span_moments(std::size_t K, std::size_t m);

// 2 exp(-2 K eps^2); any eps > 0.
double hoeffding_tail(std::size_t K, double eps);

// Requires 0 < eps < min(p, 1-p) with p = M/(K+1).
TailBounds concentration_bounds(std::size_t K, std::size_t M, double eps);

// Bernoulli KL divergence D(a || u) in nats; 0 ln 0 = 0, arguments clamped
// to [1e-15, 1 - 1e-15].
double kl_bernoulli(double a, double u);

// E[M_*^2] = 2/((K+1)^3 (K+2)) for the minimum of K+1 Dirichlet(1,...,1) spacings.
double min_spacing_second_moment(std::size_t K);

}  // namespace pinchfl::analytics
