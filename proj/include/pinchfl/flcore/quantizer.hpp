#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

namespace pinchfl::flcore {

using Vector = Eigen::VectorXd;

// b-bit symmetric uniform quantizer with per-vector max-abs scale. The scale
// travels losslessly next to the codes; only the codes count toward B_t.
struct QuantizerSpec {
    int bits = 6;
    double c_q = 1.0;       // high-rate constant: 1 - alpha(b) ~ c_q 2^(-2b)
    bool lossless = false;  // identity quantizer, alpha = 1

    static QuantizerSpec make(int bits, double c_q);
    static QuantizerSpec identity(int bits = 32);

    // 1 - min(c_q 2^(-2b), 1 - 1e-6); exactly 1 when lossless.
    double alpha() const;
    void validate() const;
};

// 2^b levels evenly spaced on [-s, s], s = max |v_i|, nearest level with
// ties broken away from zero (toward +s at exactly 0).
Vector quantize(const Vector& v, int bits);

struct EfStep {
    Vector Y;       // transmitted update Q(g + e)
    Vector e_next;  // residual g + e - Y
};

EfStep quantize_ef(const Vector& g, const Vector& e, const QuantizerSpec& spec);

// Mean of ||Q(v) - v||^2 / ||v||^2 over standard Gaussian vectors.
double mean_mse_ratio(int bits, int dim, int trials, std::uint64_t seed);

// Smallest c_q (times `margin`) covering the measured MSE ratio at every
// bit width in `bits`; throws ParameterError if some width is not
// contractive in this dimension.
double calibrate_cq(int dim, std::span<const int> bits, int trials, std::uint64_t seed, double margin = 1.2);

}  // namespace pinchfl::flcore
