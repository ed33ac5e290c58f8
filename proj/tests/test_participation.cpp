#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pinchfl/errors.hpp"
#include "pinchfl/numerics.hpp"
#include "pinchfl/participation.hpp"

using namespace pinchfl;
using namespace pinchfl::participation;

namespace {

// S = 36, d = 3, c = 1
phy::PhyParams unit_link(double D = 20.0) {
    phy::PhyParams p;
    p.S = 36.0;
    p.d = 3.0;
    p.D = D;
    p.W = 1.0;
    p.B_t = 1.0;
    p.delta = 1.0;
    return p;
}

DeadlineModel det(double T_d, double t0 = 0.0) { return {T_d, ComputeTime::deterministic(t0), 1.0}; }

}  // namespace

TEST_CASE("compute time laws") {
    const auto d = ComputeTime::deterministic(0.5);
    CHECK(d.cdf(0.49) == 0.0);
    CHECK(d.cdf(0.5) == 1.0);
    CHECK(d.cdf(0.7) == 1.0);
    const auto e = ComputeTime::shifted_exponential(0.0, 1.0);
    CHECK(e.cdf(1.0) == doctest::Approx(0.6321205588285577).epsilon(1e-14));
    CHECK(e.cdf(-1.0) == 0.0);
    CHECK_THROWS_AS(ComputeTime::shifted_exponential(0.0, 0.0), ParameterError);
    CHECK_THROWS_AS(ComputeTime::deterministic(-1.0), ParameterError);
    DeadlineModel bad{1.0, d, 0.0};
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("coverage radius closed form") {
    const auto phy = unit_link();
    const auto cr = coverage_radius(1.0, det(1.0), phy);
    CHECK(cr.rho == doctest::Approx(std::sqrt(27.0)).epsilon(1e-13));
    CHECK(cr.T_min == doctest::Approx(1.0 / std::log2(5.0)).epsilon(1e-14));
    CHECK(cr.T_min == doctest::Approx(0.4306765580733931).epsilon(1e-13));
    CHECK(cr.kappa == doctest::Approx(6.483921648269514).epsilon(1e-13));

    // the radius solves tau(rho) = T_d - t0
    CHECK(phy.latency_at_offset(cr.rho) == doctest::Approx(1.0).epsilon(1e-13));

    const auto at_min = coverage_radius(cr.T_min, det(cr.T_min), phy);
    CHECK(at_min.rho == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(coverage_radius(0.2, det(0.2), phy).rho == 0.0);

    const auto beyond = coverage_radius(100.0, det(100.0), phy);
    CHECK(beyond.rho == 10.0);
    CHECK(beyond.rho_raw > 10.0);

    DeadlineModel expo{1.0, ComputeTime::shifted_exponential(0.0, 1.0), 1.0};
    CHECK_THROWS_AS(coverage_radius(1.0, expo, phy), UnsupportedDistributionError);
}

TEST_CASE("square-root law near threshold") {
    const auto phy = unit_link();
    const double T_min = coverage_radius(1.0, det(1.0), phy).T_min;
    for (double h : {1e-6, 1e-5, 1e-4}) {
        const auto cr = coverage_radius(T_min + h, det(T_min + h), phy);
        CHECK(std::abs(cr.rho / (cr.kappa * std::sqrt(h)) - 1.0) <= 0.02);
    }
}

TEST_CASE("coverage radius increases and its derivative matches differences") {
    const auto phy = unit_link(200.0);
    const auto base = coverage_radius(1.0, det(1.0, 0.1), phy);
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double T = base.T_min + 0.02 * i;
        const auto cr = coverage_radius(T, det(T, 0.1), phy);
        CHECK(cr.rho_raw > prev);
        CHECK(cr.drho_dT > 0.0);
        const double h = 1e-6 * T;
        const double fd = (coverage_radius(T + h, det(T + h, 0.1), phy).rho_raw -
                           coverage_radius(T - h, det(T - h, 0.1), phy).rho_raw) /
                          (2.0 * h);
        CHECK(fd == doctest::Approx(cr.drho_dT).epsilon(1e-6));
        prev = cr.rho_raw;
    }
}

TEST_CASE("uniform participation counts") {
    const auto phy = unit_link(10.0);
    const auto spec = spatial::DistributionSpec::uniform(10.0);
    const double T = deadline_for_offset(2.0, ComputeTime::deterministic(0.0), phy);
    const auto r = expected_participants(40, T, det(T), spec, phy);
    CHECK(r.rho.value() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.n_conv == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(r.n_pa == 40.0);
    CHECK(r.gap == doctest::Approx(24.0).epsilon(1e-12));

    const auto early = expected_participants(40, 0.3, det(0.3, 0.5), spec, phy);
    CHECK(early.n_conv == 0.0);
    CHECK(early.n_pa == 0.0);
}

TEST_CASE("gaussian participation counts") {
    const auto phy = unit_link(10.0);
    const auto spec = spatial::DistributionSpec::gaussian_mixture(0.0, 1.0);
    const double T = deadline_for_offset(1.96, ComputeTime::deterministic(0.0), phy);
    const auto r = expected_participants(40, T, det(T), spec, phy);
    CHECK(r.n_conv == doctest::Approx(38.00016838814237).epsilon(1e-10));
    CHECK(r.n_conv == doctest::Approx(38.0).epsilon(1e-3));
}

TEST_CASE("numeric participation agrees with the closed forms") {
    const auto phy = unit_link(10.0);
    for (double T : {0.5, 0.8, 1.2, 2.0}) {
        for (auto spec : {spatial::DistributionSpec::uniform(10.0), spatial::DistributionSpec::gaussian_mixture(2.0, 1.0),
                          spatial::DistributionSpec::gaussian_mixture(0.0, 3.0)}) {
            const auto closed = expected_participants(1, T, det(T), spec, phy).n_conv;
            CHECK(conv_participation_numeric(T, det(T), spec, phy) == doctest::Approx(closed).epsilon(1e-8));
        }
    }
}

TEST_CASE("exponential compute participation matches an independent integral") {
    const auto phy = unit_link(10.0);
    DeadlineModel m{1.5, ComputeTime::shifted_exponential(0.2, 2.0), 1.0};
    const auto spec = spatial::DistributionSpec::uniform(10.0);
    const double ref = oracle::simpson(
                           [&](double x) {
                               const double slack = m.T_d - phy.latency_at_offset(std::abs(x)) - 0.2;
                               return slack > 0.0 ? 1.0 - std::exp(-2.0 * slack) : 0.0;
                           },
                           -5.0, 5.0, 1e-12) /
                       10.0;
    const auto r = expected_participants(40, m.T_d, m, spec, phy);
    CHECK(r.n_conv == doctest::Approx(40.0 * ref).epsilon(1e-8));
    CHECK(r.n_pa == doctest::Approx(40.0 * (1.0 - std::exp(-2.0 * (1.5 - 0.2 - phy.latency_at_offset(0.0))))));
    CHECK_FALSE(r.rho.has_value());
}

TEST_CASE("PA dominates CONV over random scenarios") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 400; ++i) {
        phy::PhyParams p;
        p.S = 1.0 + 99.0 * u(rng);
        p.d = 0.5 + 4.0 * u(rng);
        p.D = 1.0 + 19.0 * u(rng);
        p.W = 1.0;
        p.B_t = 1.0;
        p.delta = 1.0;
        const double t0 = 0.5 * u(rng);
        const bool expo = i % 2 == 1;
        DeadlineModel m{0.0, expo ? ComputeTime::shifted_exponential(t0, 0.5 + 4.0 * u(rng)) : ComputeTime::deterministic(t0),
                        1.0};
        m.T_d = t0 + 3.0 * u(rng) * p.latency_at_offset(0.5 * p.D);
        const auto spec = i % 3 == 0 ? spatial::DistributionSpec::gaussian_mixture(3.0 * u(rng), 0.2 + 2.0 * u(rng))
                                     : spatial::DistributionSpec::uniform(p.D);
        const auto r = expected_participants(30, m.T_d, m, spec, p);
        CHECK(r.n_pa >= r.n_conv - 1e-9);
        CHECK(r.n_conv >= 0.0);
        CHECK(r.n_pa <= 30.0);
        if (!expo && spec.kind == spatial::DistributionKind::Uniform && m.T_d >= r.T_min && r.rho &&
            *r.rho < 0.5 * p.D)
            CHECK(r.gap > 0.0);
    }
}

TEST_CASE("uniform gap shrinks as the deadline grows") {
    const auto phy = unit_link(10.0);
    const auto spec = spatial::DistributionSpec::uniform(10.0);
    const double T_min = deadline_for_offset(0.0, ComputeTime::deterministic(0.1), phy);
    const double T_max = deadline_for_offset(5.0, ComputeTime::deterministic(0.1), phy);
    double prev = 1e300;
    for (int i = 0; i < 200; ++i) {
        const double T = T_min + (T_max - T_min) * i / 200.0;
        const double gap = expected_participants(40, T, det(T, 0.1), spec, phy).gap;
        CHECK(gap <= prev + 1e-12);
        prev = gap;
    }
    CHECK(expected_participants(40, T_max, det(T_max, 0.1), spec, phy).gap == doctest::Approx(0.0));
}

TEST_CASE("farther populations gain more from PA") {
    const auto phy = unit_link(10.0);
    const std::pair<spatial::DistributionSpec, spatial::DistributionSpec> pairs[] = {
        {spatial::DistributionSpec::gaussian_mixture(3.0, 1.0), spatial::DistributionSpec::gaussian_mixture(1.0, 1.0)},
        {spatial::DistributionSpec::gaussian_mixture(0.0, 2.0), spatial::DistributionSpec::gaussian_mixture(0.0, 1.0)},
    };
    for (const auto& [far, near] : pairs)
        for (int i = 0; i <= 60; ++i) {
            const double T = 0.4 + 0.05 * i;
            const auto a = expected_participants(40, T, det(T), far, phy);
            const auto b = expected_participants(40, T, det(T), near, phy);
            CHECK(a.gap >= b.gap - 1e-12);
        }
}

TEST_CASE("gaussian mass and Mills bound") {
    CHECK(gm_mass_within(1.96, 0.0, 1.0) == doctest::Approx(0.9500042097035593).epsilon(1e-12));
    CHECK(gm_mass_within(2.0, 5.0, 1.0) == doctest::Approx(0.001349898030350282).epsilon(1e-10));
    const auto m = mills_check(5.0, 1.0, 2.0, 10.0);
    CHECK(m.mills_bound == doctest::Approx(0.001477282805284296).epsilon(1e-12));
    CHECK(m.condition_holds);
    CHECK(gm_mass_within(2.0, 5.0, 1.0) <= m.mills_bound);
    CHECK_FALSE(mills_check(5.0, 1.0, 1e-9, 10.0).condition_holds);
    CHECK_THROWS_AS(mills_check(5.0, 1.0, 5.0, 10.0), OutOfRegimeError);
    CHECK_THROWS_AS(mills_check(5.0, 1.0, -0.1, 10.0), OutOfRegimeError);
}

TEST_CASE("normal cdf tails") {
    CHECK(numerics::normal_cdf(0.0) == 0.5);
    CHECK(numerics::normal_cdf(-10.0) == doctest::Approx(7.619853024160527e-24).epsilon(1e-12));
    CHECK(1.0 - numerics::normal_cdf(1.96) == doctest::Approx(0.0249978951482204).epsilon(1e-10));
}

TEST_CASE("a deadline equal to compute plus uplink is met") {
    const auto phy = phy::PhyParams::from_link_budget(1.0, 1e-7, 28e9, 3.0, 10.0, 1e6, 6000.0, 1.0);
    for (double t0 : {0.01, 0.03, 0.1, 0.7}) {
        const double T = t0 + phy.latency_at_offset(0.0);
        const auto r = expected_participants(40, T, det(T, t0), spatial::DistributionSpec::uniform(10.0), phy);
        CHECK(r.n_pa == 40.0);
        CHECK(ComputeTime::deterministic(t0).fits(T, phy.latency_at_offset(0.0)) == 1.0);
        CHECK(ComputeTime::deterministic(t0).fits(std::nextafter(T, 0.0), phy.latency_at_offset(0.0)) == 0.0);
    }
}
