#pragma once

// Line-of-sight uplink from a user at horizontal offset x to a radiator at z
// on a waveguide of height d:
//
//   h(x, z) = sqrt(eta_f) exp(-j k0 r) / r,   r = sqrt((x - z)^2 + d^2)
//   R(x, z) = log2(1 + S / r^2),              S = P eta_f / sigma_n^2
//   tau     = c / R,                          c = B_t / (delta W)
//
// The carrier phase exp(-j k0 r) and the in-waveguide excitation phasor drop
// out of |h|^2, so neither is modeled.

#include <cstddef>

namespace pinchfl::phy {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, SI exact

// eta_f = c0^2 / (16 pi^2 f_c^2) in m^2.
double free_space_factor(double f_c);

// S = P eta_f / sigma_n2 in m^2.
double snr_scale(double P, double sigma_n2, double f_c);

struct PhyParams {
    double S = 1.0;       // SNR scale (m^2)
    double d = 3.0;       // waveguide height (m)
    double D = 10.0;      // corridor length (m)
    double W = 1e6;       // bandwidth (Hz)
    double B_t = 1.0;     // payload (bits), d_w * b
    double delta = 1.0;   // bandwidth share: 1/M for SFL-FDMA, 1 for AFL

    static PhyParams from_link_budget(double P, double sigma_n2, double f_c, double d, double D, double W,
                                      double B_t, double delta);

    void validate() const;
    PhyParams with_delta(double new_delta) const;

    // c = B_t / (delta W)
    double link_constant() const { return B_t / (delta * W); }

    // Rate and latency at link distance sqrt(offset^2 + d^2).
    double rate_at_offset(double offset) const;
    double latency_at_offset(double offset) const;
};

double spectral_efficiency(double x, double z, double S, double d);

// Same rate parameterized by Lambda = log2 S; stays finite for Lambda far
// beyond the double range of S itself.
double spectral_efficiency_log(double x, double z, double Lambda, double d);

// tau = B_t / (delta W R); throws InfeasibleLinkError when R <= 0.
double upload_latency(double R, double B_t, double W, double delta);

struct HighSnrConstants {
    double D = 0.0;
    double d = 0.0;
    double zeta = 0.0;      // D / (2 d)
    double C0 = 0.0;
    double C1 = 0.0;
    double Lambda0 = 0.0;   // expansion threshold
    double g_zeta = 0.0;    // ln(1+z^2) - 2 + (2/z) atan z
    double ell_conv = 0.0;  // (1/D) int log2(x^2 + d^2) dx over the corridor
};

double g_function(double zeta);

HighSnrConstants high_snr_constants(double D, double d);

// sup-norm bound on the remainder of 1/R0 = 1/L + log2(x^2+d^2)/L^2 + rem,
// valid for Lambda >= Lambda0.
double remainder_envelope(double Lambda, const HighSnrConstants& k);

// Lambda* = max(Lambda0, 16(C0+C1)^2 ln2 / g, log2(8 C1 ln2 / g), 1)
double lambda_star(const HighSnrConstants& k);

// g/(L^2 ln2) - 4(C0 + C1 2^-L)^2/L^3 - 2 C1 2^-L / L^2
double afl_gap_bracket(double Lambda, const HighSnrConstants& k);

// (K B_t/(delta W)) * afl_gap_bracket; may be negative below Lambda*.
double afl_time_gain_lb(std::size_t K, const PhyParams& phy, double Lambda);

// E[1/R_CONV] - 1/R_PA for X uniform on the corridor, by quadrature.
double afl_inverse_rate_gap(double Lambda, double D, double d);

}  // namespace pinchfl::phy
