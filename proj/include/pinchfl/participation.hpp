#pragma once

// Expected participant counts under a per-upload deadline T_d. A user
// participates when its compute time plus uplink time fits the deadline;
// PA pins the radiator to the uploader (r = d), CONV keeps it at z = 0.

#include <cstddef>
#include <optional>

#include "pinchfl/phy.hpp"
#include "pinchfl/random.hpp"
#include "pinchfl/spatial.hpp"

namespace pinchfl::participation {

enum class ComputeKind { Deterministic, ShiftedExponential };

struct ComputeTime {
    ComputeKind kind = ComputeKind::Deterministic;
    double t0 = 0.0;    // minimum compute time (s)
    double rate = 1.0;  // exponential rate above t0 (1/s)

    static ComputeTime deterministic(double t0);
    static ComputeTime shifted_exponential(double t0, double rate);

    // F_c(u); right-continuous, F_c(t0) = 1 for the deterministic law.
    double cdf(double u) const;
    // P(c + tau <= T_d). The deterministic law compares t0 + tau with T_d
    // directly, so a deadline set to exactly t0 + tau is met.
    double fits(double T_d, double tau) const;
    double sample(Engine& rng) const;
};

struct DeadlineModel {
    double T_d = 1.0;
    ComputeTime compute;
    double p_s = 1.0;   // trigger probability

    void validate() const;
};

struct CoverageRadius {
    double rho = 0.0;       // capped at D/2
    double rho_raw = 0.0;   // uncapped root, 0 below T_min
    double drho_dT = 0.0;   // derivative of the uncapped root, 0 below T_min
    double kappa = 0.0;     // rho ~ kappa sqrt(T - T_min) near threshold
    double T_min = 0.0;     // t0 + tau(d)
    double T_max = 0.0;     // t0 + tau(sqrt(d^2 + (D/2)^2))
};

struct ParticipationReport {
    double n_conv = 0.0;
    double n_pa = 0.0;
    double gap = 0.0;
    std::optional<double> rho;   // set for deterministic compute
    double T_min = 0.0;
    double T_max = 0.0;
    double kappa = 0.0;
};

struct MillsCheck {
    double mills_bound = 0.0;
    bool condition_holds = false;
};

// Deadline at which a CONV user at |x| = offset just fits.
double deadline_for_offset(double offset, const ComputeTime& compute, const phy::PhyParams& phy);

// Closed forms; requires deterministic compute time.
CoverageRadius coverage_radius(double T_d, const DeadlineModel& model, const phy::PhyParams& phy);

ParticipationReport expected_participants(std::size_t K, double T_d, const DeadlineModel& model,
                                          const spatial::DistributionSpec& spec, const phy::PhyParams& phy);

// P(|X| <= rho) for the symmetric Gaussian mixture.
double gm_mass_within(double rho, double mu, double sigma);

// E[F_c(T_d - tau(sqrt(X^2 + d^2)))] by adaptive quadrature, for any
// compute law and position spec.
double conv_participation_numeric(double T_d, const DeadlineModel& model, const spatial::DistributionSpec& spec,
                                  const phy::PhyParams& phy, double abs_tol = 1e-9);

MillsCheck mills_check(double mu, double sigma, double rho, double D);

}  // namespace pinchfl::participation
