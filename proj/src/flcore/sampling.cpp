#include "pinchfl/flcore/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pinchfl/errors.hpp"

namespace pinchfl::flcore {

using detail::require;

double inclusion_probability(double tau, const participation::DeadlineModel& model) {
    require(tau >= 0.0, "tau must be nonnegative");
    model.validate();
    if (tau > model.T_d) return 0.0;
    return model.p_s * model.compute.fits(model.T_d, tau);
}

double xi_safe(std::size_t K, double pi_min) {
    require(K >= 1, "K must be positive");
    require(pi_min > 0.0, "pi_min = 0: some user is never sampled");
    require(pi_min <= 1.0, "pi_min must not exceed 1");
    return (static_cast<double>(K) - 1.0 + 1.0 / pi_min) / static_cast<double>(K);
}

std::vector<GateDraw> draw_gates(std::span<const double> pis, double p_s, Engine& rng) {
    require(p_s >= 0.0 && p_s <= 1.0, "p_s must lie in [0, 1]");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<GateDraw> out(pis.size());
    for (std::size_t i = 0; i < pis.size(); ++i) {
        const double pi = pis[i];
        require(pi >= 0.0 && pi <= 1.0, "inclusion probability outside [0, 1]");
        require(pi <= p_s * (1.0 + 1e-12), "inclusion probability exceeds p_s");
        const double pe = p_s > 0.0 ? std::min(pi / p_s, 1.0) : 0.0;
        auto& g = out[i];
        g.pi = pi;
        g.E = unif(rng) < pe;
        g.Z = unif(rng) < p_s;
        g.I = g.E && g.Z;
    }
    return out;
}

std::vector<GateDraw> draw_gates(std::span<const double> pis, double p_s, std::uint64_t seed) {
    Engine rng(seed);
    return draw_gates(pis, p_s, rng);
}

Vector ht_aggregate(std::span<const HtEntry> entries, std::size_t K) {
    require(K >= 1, "K must be positive");
    require(!entries.empty(), "no entries to aggregate");
    Vector acc = Vector::Zero(entries.front().Y->size());
    for (const auto& e : entries) {
        if (!e.I) continue;
        if (!(e.pi > 0.0)) throw ParameterError("sampled user with zero inclusion probability");
        acc += *e.Y / e.pi;
    }
    return acc / static_cast<double>(K);
}

double ht_second_moment_exact(std::span<const Vector> Ys, std::span<const double> pis, std::size_t K) {
    require(Ys.size() == pis.size() && !Ys.empty(), "Ys and pis must be nonempty and aligned");
    require(K >= 1, "K must be positive");
    Vector sum = Vector::Zero(Ys.front().size());
    double extra = 0.0;
    for (std::size_t i = 0; i < Ys.size(); ++i) {
        require(pis[i] > 0.0 && pis[i] <= 1.0, "inclusion probabilities must lie in (0, 1]");
        sum += Ys[i];
        extra += (1.0 / pis[i] - 1.0) * Ys[i].squaredNorm();
    }
    const double k2 = static_cast<double>(K) * static_cast<double>(K);
    return (sum.squaredNorm() + extra) / k2;
}

}  // namespace pinchfl::flcore
