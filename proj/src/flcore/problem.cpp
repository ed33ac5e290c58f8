#include "pinchfl/flcore/problem.hpp"

#include <cmath>
#include <random>

#include "pinchfl/errors.hpp"

namespace pinchfl::flcore {

using detail::require;

SyntheticProblem SyntheticProblem::from_optima(std::vector<Vector> w_star, double noise_sigma) {
    require(!w_star.empty(), "need at least one local optimum");
    require(noise_sigma >= 0.0, "noise_sigma must be nonnegative");
    const auto dim = w_star.front().size();
    require(dim >= 1, "dimension must be positive");
    SyntheticProblem p;
    p.w_bar = Vector::Zero(dim);
    for (const auto& w : w_star) {
        require(w.size() == dim, "local optima differ in dimension");
        p.w_bar += w;
    }
    p.w_bar /= static_cast<double>(w_star.size());
    double h = 0.0;
    for (const auto& w : w_star) h += (w - p.w_bar).squaredNorm();
    p.delta2 = h / static_cast<double>(w_star.size());
    p.w_star = std::move(w_star);
    p.noise_sigma = noise_sigma;
    return p;
}

double SyntheticProblem::loss(const Vector& w) const { return loss_gap(w) + 0.5 * delta2; }

double SyntheticProblem::loss_gap(const Vector& w) const { return 0.5 * (w - w_bar).squaredNorm(); }

Vector SyntheticProblem::full_gradient(const Vector& w) const { return w - w_bar; }

double SyntheticProblem::local_grad_energy(const Vector& w) const { return (w - w_bar).squaredNorm() + delta2; }

Vector SyntheticProblem::stochastic_gradient(std::size_t i, const Vector& w, Engine& rng) const {
    Vector g = w - w_star[i];
    if (noise_sigma > 0.0) {
        std::normal_distribution<double> normal(0.0, noise_sigma / std::sqrt(static_cast<double>(dim())));
        for (auto& x : g) x += normal(rng);
    }
    return g;
}

SyntheticProblem make_synthetic_problem(std::size_t K, std::size_t d_w, double delta2, double noise_sigma,
                                        std::uint64_t seed, double center_norm) {
    require(K >= 1 && d_w >= 1, "K and d_w must be positive");
    require(delta2 >= 0.0, "delta2 must be nonnegative");
    require(center_norm >= 0.0, "center_norm must be nonnegative");
    require(delta2 == 0.0 || K >= 2, "a single user cannot be heterogeneous");
    const auto n = static_cast<Eigen::Index>(d_w);
    std::normal_distribution<double> normal;

    Engine crng = substream(seed, {0});
    Vector center = Vector::Zero(n);
    if (center_norm > 0.0) {
        Vector dir(n);
        do {
            for (auto& x : dir) x = normal(crng);
        } while (dir.squaredNorm() == 0.0);
        center = dir.normalized() * center_norm;
    }

    std::vector<Vector> u(K, Vector::Zero(n));
    if (delta2 > 0.0) {
        Engine rng = substream(seed, {1});
        Vector mean = Vector::Zero(n);
        for (auto& v : u) {
            for (auto& x : v) x = normal(rng);
            mean += v;
        }
        mean /= static_cast<double>(K);
        double h = 0.0;
        for (auto& v : u) {
            v -= mean;
            h += v.squaredNorm();
        }
        const double scale = std::sqrt(delta2 * static_cast<double>(K) / h);
        for (auto& v : u) v *= scale;
    }

    std::vector<Vector> w_star(K);
    for (std::size_t i = 0; i < K; ++i) w_star[i] = center + u[i];
    SyntheticProblem p = SyntheticProblem::from_optima(std::move(w_star), noise_sigma);
    // Keep the target values themselves; the recomputed ones differ by
    // rounding only.
    p.w_bar = center;
    p.delta2 = delta2;
    return p;
}

}  // namespace pinchfl::flcore
