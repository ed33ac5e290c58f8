#include "pinchfl/participation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pinchfl/errors.hpp"
#include "pinchfl/numerics.hpp"

namespace pinchfl::participation {

using detail::require;
using spatial::DistributionKind;
using spatial::DistributionSpec;

ComputeTime ComputeTime::deterministic(double t0) {
    require(t0 >= 0.0, "t0 must be non-negative");
    return {ComputeKind::Deterministic, t0, 1.0};
}

ComputeTime ComputeTime::shifted_exponential(double t0, double rate) {
    require(t0 >= 0.0, "t0 must be non-negative");
    require(rate > 0.0, "compute rate must be positive");
    return {ComputeKind::ShiftedExponential, t0, rate};
}

double ComputeTime::cdf(double u) const {
    if (u < t0) return 0.0;
    if (kind == ComputeKind::Deterministic) return 1.0;
    return -std::expm1(-rate * (u - t0));
}

double ComputeTime::fits(double T_d, double tau) const {
    if (kind == ComputeKind::Deterministic) return t0 + tau <= T_d ? 1.0 : 0.0;
    return cdf(T_d - tau);
}

double ComputeTime::sample(Engine& rng) const {
    if (kind == ComputeKind::Deterministic) return t0;
    return t0 + std::exponential_distribution<double>(rate)(rng);
}

void DeadlineModel::validate() const {
    require(T_d >= 0.0, "deadline must be non-negative");
    require(compute.t0 >= 0.0, "t0 must be non-negative");
    require(compute.kind == ComputeKind::Deterministic || compute.rate > 0.0, "compute rate must be positive");
    require(p_s > 0.0 && p_s <= 1.0, "trigger probability must lie in (0, 1]");
}

double deadline_for_offset(double offset, const ComputeTime& compute, const phy::PhyParams& phy) {
    return compute.t0 + phy.latency_at_offset(offset);
}

namespace {

// Uncapped coverage radius and its derivative at deadline T.
struct RawRoot {
    double rho = 0.0;
    double drho = 0.0;
};

RawRoot raw_root(double T, double t0, const phy::PhyParams& phy) {
    if (!(T > t0)) return {};
    const double c = phy.link_constant();
    const double dt = T - t0;
    const double e = c / dt * std::numbers::ln2;
    const double qm1 = std::expm1(e);   // q - 1
    const double arg = phy.S / qm1 - phy.d * phy.d;
    if (!(arg > 0.0)) return {};
    RawRoot r;
    r.rho = std::sqrt(arg);
    // S q ln2 c / (2 rho (q-1)^2 (T-t0)^2), with q/(q-1)^2 written to stay finite
    const double q_over = (1.0 + qm1) / qm1 / qm1;
    r.drho = phy.S * q_over * std::numbers::ln2 * c / (2.0 * r.rho * dt * dt);
    return r;
}

}  // namespace

CoverageRadius coverage_radius(double T_d, const DeadlineModel& model, const phy::PhyParams& phy) {
    model.validate();
    phy.validate();
    if (model.compute.kind != ComputeKind::Deterministic)
        throw UnsupportedDistributionError("coverage radius closed form needs deterministic compute time");
    const double t0 = model.compute.t0;
    const double S = phy.S, d = phy.d, c = phy.link_constant();

    CoverageRadius out;
    out.T_min = deadline_for_offset(0.0, model.compute, phy);
    out.T_max = deadline_for_offset(0.5 * phy.D, model.compute, phy);
    const double lambda_d = std::log1p(S / (d * d)) / std::numbers::ln2;
    out.kappa = d * d / std::sqrt(S) * std::sqrt(1.0 + S / (d * d)) * lambda_d * std::sqrt(std::numbers::ln2 / c);

    if (T_d >= out.T_min) {
        const auto root = raw_root(T_d, t0, phy);
        out.rho_raw = root.rho;
        out.drho_dT = root.drho;
    }
    out.rho = std::min(out.rho_raw, 0.5 * phy.D);
    if (T_d >= out.T_max) out.rho = 0.5 * phy.D;
    return out;
}

double gm_mass_within(double rho, double mu, double sigma) {
    using numerics::normal_cdf;
    if (!(rho > 0.0)) return 0.0;
    const double right = normal_cdf((rho - mu) / sigma) - normal_cdf((-rho - mu) / sigma);
    const double left = normal_cdf((rho + mu) / sigma) - normal_cdf((-rho + mu) / sigma);
    return 0.5 * right + 0.5 * left;
}

double conv_participation_numeric(double T_d, const DeadlineModel& model, const DistributionSpec& spec,
                                  const phy::PhyParams& phy, double abs_tol) {
    model.validate();
    spec.validate();
    phy.validate();
    const double t0 = model.compute.t0;
    // Beyond the raw root the uplink alone overruns T_d - t0, so F_c is 0.
    const double reach = raw_root(T_d, t0, phy).rho;
    if (!(reach > 0.0)) return 0.0;

    auto success = [&](double y) {
        const double tau = phy.latency_at_offset(y);
        return model.compute.fits(T_d, tau);
    };

    if (spec.kind == DistributionKind::Uniform) {
        const double hi = std::min(reach, 0.5 * spec.D);
        return 2.0 / spec.D * numerics::integrate(success, 0.0, hi, abs_tol * 0.5 * spec.D);
    }
    const double mu = spec.mu, sigma = spec.sigma;
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
    auto folded = [&](double y) {
        const double a = (y - mu) / sigma, b = (y + mu) / sigma;
        // density of |X|: f(y) + f(-y) for the symmetric mixture
        return norm * (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b));
    };
    const double hi = std::min(reach, mu + 40.0 * sigma);
    // Split at the cluster center so the peak does not fall across a panel edge.
    auto integrand = [&](double y) { return folded(y) * success(y); };
    double total = 0.0;
    if (mu > 0.0 && mu < hi) {
        total += numerics::integrate(integrand, 0.0, mu, 0.5 * abs_tol);
        total += numerics::integrate(integrand, mu, hi, 0.5 * abs_tol);
    } else {
        total = numerics::integrate(integrand, 0.0, hi, abs_tol);
    }
    return total;
}

ParticipationReport expected_participants(std::size_t K, double T_d, const DeadlineModel& model,
                                          const DistributionSpec& spec, const phy::PhyParams& phy) {
    model.validate();
    spec.validate();
    phy.validate();
    const double k = static_cast<double>(K);
    ParticipationReport r;
    r.T_min = deadline_for_offset(0.0, model.compute, phy);
    r.T_max = deadline_for_offset(0.5 * phy.D, model.compute, phy);
    r.n_pa = k * model.compute.fits(T_d, phy.latency_at_offset(0.0));

    if (model.compute.kind == ComputeKind::Deterministic) {
        const auto cov = coverage_radius(T_d, model, phy);
        r.kappa = cov.kappa;
        if (spec.kind == DistributionKind::Uniform) {
            // coverage is measured against the sample's own corridor
            const double rho = (T_d >= deadline_for_offset(0.5 * spec.D, model.compute, phy))
                                   ? 0.5 * spec.D
                                   : std::min(cov.rho_raw, 0.5 * spec.D);
            r.rho = rho;
            r.n_conv = k * std::min(2.0 * rho / spec.D, 1.0);
        } else {
            r.rho = cov.rho_raw;
            r.n_conv = k * gm_mass_within(cov.rho_raw, spec.mu, spec.sigma);
        }
    } else {
        r.n_conv = k * conv_participation_numeric(T_d, model, spec, phy);
    }
    r.gap = r.n_pa - r.n_conv;
    return r;
}

MillsCheck mills_check(double mu, double sigma, double rho, double D) {
    require(sigma > 0.0 && D > 0.0, "sigma and D must be positive");
    if (!(rho >= 0.0 && rho < mu)) throw OutOfRegimeError("Mills-ratio bound needs 0 <= rho < mu");
    const double s2 = 2.0 * sigma * sigma;
    const double a = mu - rho, b = mu + rho;
    MillsCheck m;
    m.mills_bound = sigma / std::sqrt(2.0 * std::numbers::pi) * (std::exp(-a * a / s2) / a + std::exp(-b * b / s2) / b);
    m.condition_holds = m.mills_bound <= 2.0 * rho / D;
    return m;
}

}  // namespace pinchfl::participation
