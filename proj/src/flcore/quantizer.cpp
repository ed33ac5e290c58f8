#include "pinchfl/flcore/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pinchfl/errors.hpp"
#include "pinchfl/random.hpp"

namespace pinchfl::flcore {

using detail::require;

QuantizerSpec QuantizerSpec::make(int bits, double c_q) {
    QuantizerSpec q{bits, c_q, false};
    q.validate();
    return q;
}

QuantizerSpec QuantizerSpec::identity(int bits) { return {bits, 1.0, true}; }

double QuantizerSpec::alpha() const {
    if (lossless) return 1.0;
    return 1.0 - std::min(c_q * std::exp2(-2.0 * bits), 1.0 - 1e-6);
}

void QuantizerSpec::validate() const {
    require(bits >= 1 && bits <= 52, "bits must lie in [1, 52]");
    require(c_q > 0.0 && std::isfinite(c_q), "c_q must be positive");
}

Vector quantize(const Vector& v, int bits) {
    require(bits >= 1 && bits <= 52, "bits must lie in [1, 52]");
    const double s = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    if (s == 0.0) return Vector::Zero(v.size());
    const double n = std::exp2(bits) - 1.0;  // number of steps between -s and s
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double u = v[i] / s;
        const double t = 0.5 * (u + 1.0) * n;
        const double lo = std::floor(t);
        double k = (t - lo == 0.5 && u < 0.0) ? lo : std::floor(t + 0.5);
        k = std::clamp(k, 0.0, n);
        out[i] = s * (2.0 * k - n) / n;
    }
    return out;
}

EfStep quantize_ef(const Vector& g, const Vector& e, const QuantizerSpec& spec) {
    require(g.size() == e.size(), "gradient and residual dimensions differ");
    Vector v = g + e;
    Vector Y = spec.lossless ? v : quantize(v, spec.bits);
    Vector e_next = v - Y;
    return {std::move(Y), std::move(e_next)};
}

double mean_mse_ratio(int bits, int dim, int trials, std::uint64_t seed) {
    require(dim >= 1 && trials >= 1, "dim and trials must be positive");
    std::normal_distribution<double> normal;
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        Engine rng = substream(seed, {static_cast<std::uint64_t>(bits), static_cast<std::uint64_t>(t)});
        Vector v(dim);
        for (auto& x : v) x = normal(rng);
        sum += (quantize(v, bits) - v).squaredNorm() / v.squaredNorm();
    }
    return sum / trials;
}

double calibrate_cq(int dim, std::span<const int> bits, int trials, std::uint64_t seed, double margin) {
    require(!bits.empty(), "need at least one bit width");
    double cq = 0.0;
    for (int b : bits) {
        const double ratio = mean_mse_ratio(b, dim, trials, seed);
        if (!(ratio < 1.0))
            throw ParameterError("quantizer is not contractive at " + std::to_string(b) + " bits in dimension " +
                                 std::to_string(dim));
        cq = std::max(cq, ratio * std::exp2(2.0 * b));
    }
    return cq * margin;
}

}  // namespace pinchfl::flcore
