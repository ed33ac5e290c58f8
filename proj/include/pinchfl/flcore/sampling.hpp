#pragma once

// Two-stage participation gates and Horvitz-Thompson aggregation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pinchfl/flcore/quantizer.hpp"
#include "pinchfl/participation.hpp"
#include "pinchfl/random.hpp"

namespace pinchfl::flcore {

struct GateDraw {
    bool E = false;   // compute finished inside the deadline
    bool Z = false;   // user responded to the trigger
    bool I = false;   // E and Z
    double pi = 0.0;  // P(I = 1)
};

// p_s F_c(T_d - tau); zero once tau exceeds the deadline.
double inclusion_probability(double tau, const participation::DeadlineModel& model);

// (K - 1 + 1/pi_min) / K
double xi_safe(std::size_t K, double pi_min);

// Independent gates with P(Z) = p_s and P(E) = pi / p_s.
std::vector<GateDraw> draw_gates(std::span<const double> pis, double p_s, Engine& rng);
std::vector<GateDraw> draw_gates(std::span<const double> pis, double p_s, std::uint64_t seed);

struct HtEntry {
    bool I = false;
    double pi = 1.0;
    const Vector* Y = nullptr;
};

// (1/K) sum I_i / pi_i Y_i
Vector ht_aggregate(std::span<const HtEntry> entries, std::size_t K);

// E ||ht_aggregate||^2 over the gates, Y held fixed.
double ht_second_moment_exact(std::span<const Vector> Ys, std::span<const double> pis, std::size_t K);

}  // namespace pinchfl::flcore
