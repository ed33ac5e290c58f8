#include "pinchfl/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pinchfl/errors.hpp"

namespace pinchfl::spatial {

using detail::require;

DistributionSpec DistributionSpec::uniform(double D) {
    DistributionSpec s{DistributionKind::Uniform, D, 0.0, 1.0};
    s.validate();
    return s;
}

DistributionSpec DistributionSpec::gaussian_mixture(double mu, double sigma) {
    DistributionSpec s{DistributionKind::GaussianMixture, 10.0, mu, sigma};
    s.validate();
    return s;
}

void DistributionSpec::validate() const {
    if (kind == DistributionKind::Uniform) {
        require(D > 0.0 && std::isfinite(D), "corridor length D must be positive");
    } else {
        require(sigma > 0.0 && std::isfinite(sigma), "mixture sigma must be positive");
        require(mu >= 0.0 && std::isfinite(mu), "mixture mu must be non-negative");
    }
}

void draw_positions(const DistributionSpec& spec, Engine& rng, std::span<double> out) {
    if (spec.kind == DistributionKind::Uniform) {
        std::uniform_real_distribution<double> u(-0.5 * spec.D, 0.5 * spec.D);
        for (auto& x : out) x = u(rng);
        return;
    }
    std::bernoulli_distribution coin(0.5);
    std::normal_distribution<double> noise(0.0, spec.sigma);
    for (auto& x : out) {
        const double center = coin(rng) ? spec.mu : -spec.mu;
        x = center + noise(rng);
    }
}

PositionSample sample_positions(const DistributionSpec& spec, std::size_t K, std::uint64_t seed) {
    spec.validate();
    require(K >= 1, "K must be at least 1");
    PositionSample s{std::vector<double>(K), spec, seed};
    Engine rng(seed);
    draw_positions(spec, rng, s.xs);
    return s;
}

double conv_bottleneck(std::span<const double> xs, std::size_t M) {
    require(M >= 1 && M <= xs.size(), "M must satisfy 1 <= M <= K");
    std::vector<double> ys(xs.size());
    std::transform(xs.begin(), xs.end(), ys.begin(), [](double x) { return std::abs(x); });
    auto nth = ys.begin() + static_cast<std::ptrdiff_t>(M - 1);
    std::nth_element(ys.begin(), nth, ys.end());
    return *nth;
}

double conv_bottleneck(const PositionSample& sample, std::size_t M) {
    return conv_bottleneck(std::span<const double>(sample.xs), M);
}

StragglerOffsets pa_bottleneck_sorted(std::span<const double> sorted, std::size_t M) {
    const std::size_t K = sorted.size();
    require(M >= 1 && M <= K, "M must satisfy 1 <= M <= K");
    StragglerOffsets out;
    double best = std::numeric_limits<double>::infinity();
    // strict '<' keeps the lowest starting index on ties
    for (std::size_t i = 0; i + M <= K; ++i) {
        const double span = sorted[i + M - 1] - sorted[i];
        if (span < best) {
            best = span;
            out.lo_index = i;
        }
    }
    out.hi_index = out.lo_index + M - 1;
    out.pa_offset = 0.5 * best;
    out.z_star = 0.5 * (sorted[out.lo_index] + sorted[out.hi_index]);
    out.conv_offset = conv_bottleneck(sorted, M);
    return out;
}

StragglerOffsets pa_bottleneck(const PositionSample& sample, std::size_t M) {
    std::vector<double> sorted = sample.xs;
    std::stable_sort(sorted.begin(), sorted.end());
    return pa_bottleneck_sorted(sorted, M);
}

std::vector<double> m_spans(const PositionSample& sample, std::size_t m) {
    const std::size_t K = sample.size();
    require(m >= 1 && m + 1 <= K, "m must satisfy 1 <= m <= K-1");
    std::vector<double> sorted = sample.xs;
    std::stable_sort(sorted.begin(), sorted.end());
    std::vector<double> spans(K - m);
    for (std::size_t i = 0; i + m < K; ++i) spans[i] = sorted[i + m] - sorted[i];
    return spans;
}

double min_simple_spacing_sorted(std::span<const double> sorted, double D) {
    require(!sorted.empty(), "sample must be non-empty");
    auto u = [D](double x) { return (x + 0.5 * D) / D; };
    double best = std::min(u(sorted.front()), 1.0 - u(sorted.back()));
    for (std::size_t j = 1; j < sorted.size(); ++j) best = std::min(best, u(sorted[j]) - u(sorted[j - 1]));
    return best;
}

double min_simple_spacing(const PositionSample& sample) {
    if (sample.spec.kind != DistributionKind::Uniform)
        throw UnsupportedDistributionError("minimum simple spacing needs a uniform corridor sample");
    std::vector<double> sorted = sample.xs;
    std::stable_sort(sorted.begin(), sorted.end());
    return min_simple_spacing_sorted(sorted, sample.spec.D);
}

}  // namespace pinchfl::spatial
