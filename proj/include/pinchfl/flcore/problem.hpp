#pragma once

// K local quadratics f_i(w) = 0.5 ||w - w_i*||^2. With w_bar the mean of the
// w_i*, F(w) = 0.5 ||w - w_bar||^2 + 0.5 delta2, so L = mu = 1 and
// F* = delta2 / 2.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pinchfl/flcore/quantizer.hpp"
#include "pinchfl/random.hpp"

namespace pinchfl::flcore {

struct SyntheticProblem {
    std::vector<Vector> w_star;
    Vector w_bar;
    double noise_sigma = 0.0;   // E ||noise||^2 = sigma^2
    double delta2 = 0.0;

    static SyntheticProblem from_optima(std::vector<Vector> w_star, double noise_sigma);

    std::size_t K() const noexcept { return w_star.size(); }
    Eigen::Index dim() const noexcept { return w_bar.size(); }
    double L() const noexcept { return 1.0; }
    double mu() const noexcept { return 1.0; }
    double sigma2() const noexcept { return noise_sigma * noise_sigma; }

    double loss(const Vector& w) const;          // F(w)
    double loss_gap(const Vector& w) const;      // F(w) - F*
    Vector full_gradient(const Vector& w) const; // w - w_bar

    // (1/K) sum ||grad f_i(w)||^2 = ||w - w_bar||^2 + delta2
    double local_grad_energy(const Vector& w) const;

    // grad f_i(w) plus N(0, sigma^2/d_w) per coordinate.
    Vector stochastic_gradient(std::size_t i, const Vector& w, Engine& rng) const;
};

// Optima w_bar + u_i with u_i centered Gaussian draws rescaled so that
// (1/K) sum ||u_i||^2 = delta2 exactly; w_bar is a random direction of norm
// `center_norm`.
SyntheticProblem make_synthetic_problem(std::size_t K, std::size_t d_w, double delta2, double noise_sigma,
                                        std::uint64_t seed, double center_norm = 0.0);

}  // namespace pinchfl::flcore
