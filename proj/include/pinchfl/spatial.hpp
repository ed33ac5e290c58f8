#pragma once

// User positions along the corridor and the order-statistic geometry of
// straggler offsets: M-th closest user, tightest M-window, m-spans and the
// minimum simple spacing.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pinchfl/random.hpp"

namespace pinchfl::spatial {

enum class DistributionKind { Uniform, GaussianMixture };

struct DistributionSpec {
    DistributionKind kind = DistributionKind::Uniform;
    double D = 10.0;      // corridor length (Uniform)
    double mu = 0.0;      // cluster offset (GaussianMixture)
    double sigma = 1.0;   // cluster std (GaussianMixture)

    static DistributionSpec uniform(double D);
    static DistributionSpec gaussian_mixture(double mu, double sigma);

    void validate() const;
};

struct PositionSample {
    std::vector<double> xs;
    DistributionSpec spec;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return xs.size(); }
};

struct StragglerOffsets {
    double conv_offset = 0.0;   // Y_[M]
    double pa_offset = 0.0;     // L_M / 2
    double z_star = 0.0;        // midpoint of the tightest window
    std::size_t lo_index = 0;   // window bounds, indices into the sorted sample
    std::size_t hi_index = 0;
};

// Fills `out` with i.i.d. draws. Uniform draws lie in [-D/2, D/2]; mixture
// draws pick +-mu with a fair coin and are not clipped.
void draw_positions(const DistributionSpec& spec, Engine& rng, std::span<double> out);

PositionSample sample_positions(const DistributionSpec& spec, std::size_t K, std::uint64_t seed);

double conv_bottleneck(std::span<const double> xs, std::size_t M);
double conv_bottleneck(const PositionSample& sample, std::size_t M);

// `sorted` must be ascending.
StragglerOffsets pa_bottleneck_sorted(std::span<const double> sorted, std::size_t M);
StragglerOffsets pa_bottleneck(const PositionSample& sample, std::size_t M);

std::vector<double> m_spans(const PositionSample& sample, std::size_t m);

// Minimum of the K+1 simple spacings of u = (x + D/2)/D; `sorted` ascending.
double min_simple_spacing_sorted(std::span<const double> sorted, double D);
double min_simple_spacing(const PositionSample& sample);

}  // namespace pinchfl::spatial
