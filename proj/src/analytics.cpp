#include "pinchfl/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "pinchfl/errors.hpp"

namespace pinchfl::analytics {

using detail::require;

MomentPair order_stat_moments(std::size_t K, std::size_t M) {
    require(M >= 1 && M <= K, "M must satisfy 1 <= M <= K");
    const double k = static_cast<double>(K), mm = static_cast<double>(M);
    return {mm / (k + 1.0), mm * (mm + 1.0) / ((k + 1.0) * (k + 2.0))};
}

MomentPair span_moments(std::size_t K, std::size_t m) {
    require(m >= 1 && m + 1 <= K, "m must satisfy 1 <= m <= K-1");
    const double k = static_cast<double>(K), s = static_cast<double>(m);
    return {s / (k + 1.0), s * (s + 1.0) / ((k + 1.0) * (k + 2.0))};
}

StragglerMomentReport straggler_moments(std::size_t K, std::size_t M, double D) {
    require(M >= 1 && M <= K, "M must satisfy 1 <= M <= K");
    require(D > 0.0, "corridor length D must be positive");
    const double k = static_cast<double>(K);
    const double mM = static_cast<double>(M);
    const double m = mM - 1.0;
    const double q = 0.25 * D * D;

    StragglerMomentReport r;
    r.conv_E2 = q * order_stat_moments(K, M).second;
    r.pa_ub_avg = q * (m / (k - m)) * (m / (k - m));
    r.pa_ub_beta = q * m * (m + 1.0) / ((k + 1.0) * (k + 2.0));
    r.pa_ub = std::min(r.pa_ub_avg, r.pa_ub_beta);
    r.pa_lb = q * m * m * min_spacing_second_moment(K);
    r.ratio_limit = m * m / (mM * (mM + 1.0));
    return r;
}

double kl_bernoulli(double a, double u) {
    constexpr double lo = 1e-15, hi = 1.0 - 1e-15;
    a = std::clamp(a, 0.0, 1.0);
    u = std::clamp(u, lo, hi);
    auto term = [](double p, double q) { return p <= 0.0 ? 0.0 : p * std::log(p / q); };
    return term(a, u) + term(1.0 - a, 1.0 - u);
}

double hoeffding_tail(std::size_t K, double eps) {
    require(K >= 1 && eps > 0.0, "K >= 1 and eps > 0 required");
    return 2.0 * std::exp(-2.0 * static_cast<double>(K) * eps * eps);
}

TailBounds concentration_bounds(std::size_t K, std::size_t M, double eps) {
    require(M >= 1 && M <= K, "M must satisfy 1 <= M <= K");
    const double k = static_cast<double>(K), mM = static_cast<double>(M);
    const double p_dagger = mM / (k + 1.0);
    require(eps > 0.0 && eps < std::min(p_dagger, 1.0 - p_dagger),
            "eps must lie in (0, min(p, 1-p)) with p = M/(K+1)");
    const double p_star = mM / k;
    TailBounds b;
    b.kl_lower_tail = std::exp(-k * kl_bernoulli(p_star, p_dagger - eps));
    b.kl_upper_tail = std::exp(-k * kl_bernoulli((mM - 1.0) / k, p_dagger + eps));
    b.hoeffding_two_sided = hoeffding_tail(K, eps);
    return b;
}

double min_spacing_second_moment(std::size_t K) {
    require(K >= 1, "K must be at least 1");
    const double k1 = static_cast<double>(K) + 1.0;
    return 2.0 / (k1 * k1 * k1 * (k1 + 1.0));
}

}  // namespace pinchfl::analytics
