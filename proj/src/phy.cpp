#include "pinchfl/phy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pinchfl/errors.hpp"
#include "pinchfl/numerics.hpp"

namespace pinchfl::phy {

using detail::require;
using std::numbers::ln2;
using std::numbers::pi;

double free_space_factor(double f_c) {
    require(f_c > 0.0, "carrier frequency must be positive");
    return kSpeedOfLight * kSpeedOfLight / (16.0 * pi * pi * f_c * f_c);
}

double snr_scale(double P, double sigma_n2, double f_c) {
    require(P > 0.0, "transmit power must be positive");
    require(sigma_n2 > 0.0, "noise power must be positive");
    return P * free_space_factor(f_c) / sigma_n2;
}

PhyParams PhyParams::from_link_budget(double P, double sigma_n2, double f_c, double d, double D, double W,
                                      double B_t, double delta) {
    PhyParams p{snr_scale(P, sigma_n2, f_c), d, D, W, B_t, delta};
    p.validate();
    return p;
}

void PhyParams::validate() const {
    require(S > 0.0 && std::isfinite(S), "SNR scale must be positive");
    require(d > 0.0, "waveguide height must be positive");
    require(D > 0.0, "corridor length must be positive");
    require(W > 0.0, "bandwidth must be positive");
    require(B_t > 0.0, "payload must be positive");
    require(delta > 0.0 && delta <= 1.0, "bandwidth share must lie in (0, 1]");
}

PhyParams PhyParams::with_delta(double new_delta) const {
    PhyParams p = *this;
    p.delta = new_delta;
    p.validate();
    return p;
}

double PhyParams::rate_at_offset(double offset) const { return spectral_efficiency(offset, 0.0, S, d); }

double PhyParams::latency_at_offset(double offset) const {
    return upload_latency(rate_at_offset(offset), B_t, W, delta);
}

double spectral_efficiency(double x, double z, double S, double d) {
    require(S > 0.0 && d > 0.0, "S and d must be positive");
    const double dx = x - z;
    return std::log1p(S / (dx * dx + d * d)) / std::numbers::ln2;
}

double spectral_efficiency_log(double x, double z, double Lambda, double d) {
    require(d > 0.0, "d must be positive");
    const double dx = x - z;
    const double r2 = dx * dx + d * d;
    return Lambda - std::log2(r2) + std::log1p(r2 * std::exp2(-Lambda)) / ln2;
}

double upload_latency(double R, double B_t, double W, double delta) {
    if (!(R > 0.0)) throw InfeasibleLinkError("spectral efficiency is zero; upload cannot complete");
    const double t = B_t / (delta * W * R);
    if (!std::isfinite(t)) throw InfeasibleLinkError("upload time overflows; link budget too small");
    return t;
}

double g_function(double zeta) {
    require(zeta > 0.0, "zeta must be positive");
    // Series near 0 avoids cancellation: g = z^2/3 - z^4/10 + z^6/21 - ...
    if (zeta < 1e-3) {
        const double z2 = zeta * zeta;
        return z2 / 3.0 - z2 * z2 / 10.0 + z2 * z2 * z2 / 21.0;
    }
    return std::log1p(zeta * zeta) - 2.0 + (2.0 / zeta) * std::atan(zeta);
}

HighSnrConstants high_snr_constants(double D, double d) {
    require(D > 0.0 && d > 0.0, "D and d must be positive");
    HighSnrConstants k;
    k.D = D;
    k.d = d;
    const double d2 = d * d;
    const double edge2 = d2 + 0.25 * D * D;
    k.zeta = D / (2.0 * d);
    k.C0 = std::max(std::abs(std::log2(d2)), std::abs(std::log2(edge2)));
    k.C1 = edge2 / ln2;
    k.Lambda0 = std::max({4.0 * k.C0, std::log2(4.0 * k.C1), 1.0});
    k.g_zeta = g_function(k.zeta);
    k.ell_conv = std::log2(d2) + k.g_zeta / ln2;
    return k;
}

double remainder_envelope(double Lambda, const HighSnrConstants& k) {
    if (!(Lambda >= k.Lambda0)) throw OutOfRegimeError("Lambda is below the expansion threshold Lambda0");
    const double tail = k.C1 * std::exp2(-Lambda);
    const double lead = k.C0 + tail;
    return 2.0 * lead * lead / (Lambda * Lambda * Lambda) + tail / (Lambda * Lambda);
}

double lambda_star(const HighSnrConstants& k) {
    require(k.g_zeta > 0.0, "g(zeta) must be positive");
    const double c = k.C0 + k.C1;
    return std::max({k.Lambda0, 16.0 * c * c * ln2 / k.g_zeta, std::log2(8.0 * k.C1 * ln2 / k.g_zeta), 1.0});
}

double afl_gap_bracket(double Lambda, const HighSnrConstants& k) {
    if (!(Lambda >= k.Lambda0)) throw OutOfRegimeError("Lambda is below the expansion threshold Lambda0");
    const double L2 = Lambda * Lambda;
    const double tail = k.C1 * std::exp2(-Lambda);
    const double lead = k.C0 + tail;
    return k.g_zeta / (L2 * ln2) - 4.0 * lead * lead / (L2 * Lambda) - 2.0 * tail / L2;
}

double afl_time_gain_lb(std::size_t K, const PhyParams& phy, double Lambda) {
    phy.validate();
    const auto k = high_snr_constants(phy.D, phy.d);
    return static_cast<double>(K) * phy.link_constant() * afl_gap_bracket(Lambda, k);
}

double afl_inverse_rate_gap(double Lambda, double D, double d) {
    require(D > 0.0 && d > 0.0, "D and d must be positive");
    const double r_pa = spectral_efficiency_log(0.0, 0.0, Lambda, d);
    const double d2 = d * d;
    const double tail = std::exp2(-Lambda);
    // 1/R - 1/R_pa = (R_pa - R) / (R R_pa), with R_pa - R formed without
    // subtracting the two O(Lambda) rates.
    auto diff = [&](double x) {
        const double r2 = x * x + d2;
        const double drop = std::log2(r2 / d2) + (std::log1p(d2 * tail) - std::log1p(r2 * tail)) / std::numbers::ln2;
        return drop / (spectral_efficiency_log(x, 0.0, Lambda, d) * r_pa);
    };
    const double scale = 1.0 / (Lambda * Lambda);
    return 2.0 / D * numerics::integrate(diff, 0.0, 0.5 * D, 1e-13 * scale * D);
}

}  // namespace pinchfl::phy
