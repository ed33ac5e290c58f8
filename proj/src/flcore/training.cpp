#include "pinchfl/flcore/training.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "pinchfl/errors.hpp"
#include "pinchfl/flcore/sampling.hpp"

namespace pinchfl::flcore {

using detail::require;

namespace {

// Substream tags. Both architectures draw from the same tags so a pair of
// runs with equal seeds sees identical positions, noise and gates.
enum : std::uint64_t { kPositions = 1, kGradient = 2, kGate = 3 };

struct Hasher {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    Hasher& add(std::uint64_t v) {
        h = mix64(h ^ v);
        return *this;
    }
    Hasher& add(double v) { return add(std::bit_cast<std::uint64_t>(v)); }
};

void hash_common(Hasher& hs, const SyntheticProblem& p, const spatial::PositionSample& s, const phy::PhyParams& phy,
                 const QuantizerSpec& q) {
    hs.add(static_cast<std::uint64_t>(p.K())).add(static_cast<std::uint64_t>(p.dim()));
    hs.add(p.noise_sigma).add(p.delta2).add(p.w_bar.squaredNorm());
    hs.add(static_cast<std::uint64_t>(s.spec.kind)).add(s.spec.D).add(s.spec.mu).add(s.spec.sigma);
    hs.add(phy.S).add(phy.d).add(phy.D).add(phy.W).add(phy.B_t);
    hs.add(static_cast<std::uint64_t>(q.bits)).add(q.c_q).add(static_cast<std::uint64_t>(q.lossless));
}

void refresh_positions(const spatial::PositionSample& sample, bool redraw, std::uint64_t seed, std::uint64_t key,
                       std::vector<double>& xs) {
    if (!redraw) {
        xs = sample.xs;
        return;
    }
    Engine rng = substream(seed, {kPositions, key});
    spatial::draw_positions(sample.spec, rng, xs);
}

}  // namespace

std::string_view to_string(Architecture a) { return a == Architecture::PA ? "PA" : "CONV"; }
std::string_view to_string(Weighting w) { return w == Weighting::HT ? "HT" : "uniform"; }

Schedule schedule_round(std::span<const double> xs, std::size_t M, Architecture arch) {
    require(M >= 1 && M <= xs.size(), "M must lie in [1, K]");
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Schedule s;
    if (arch == Architecture::CONV) {
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return std::abs(xs[a]) < std::abs(xs[b]); });
        s.users.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(M));
        s.z = 0.0;
    } else {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
        std::vector<double> sorted(xs.size());
        for (std::size_t i = 0; i < idx.size(); ++i) sorted[i] = xs[idx[i]];
        const auto off = spatial::pa_bottleneck_sorted(sorted, M);
        s.users.assign(idx.begin() + static_cast<std::ptrdiff_t>(off.lo_index),
                       idx.begin() + static_cast<std::ptrdiff_t>(off.hi_index) + 1);
        s.z = off.z_star;
    }
    std::sort(s.users.begin(), s.users.end());
    return s;
}

Schedule schedule_round(const spatial::PositionSample& sample, std::size_t M, Architecture arch) {
    return schedule_round(std::span<const double>(sample.xs), M, arch);
}

std::optional<double> TrainLog::time_to_loss(double target) const {
    for (const auto& r : records)
        if (r.loss <= target) return r.time;
    return std::nullopt;
}

TrainLog run_sfl(const SyntheticProblem& problem, const spatial::PositionSample& sample, const phy::PhyParams& phy,
                 const SflConfig& cfg) {
    const std::size_t K = problem.K();
    require(sample.size() == K, "position sample size must equal K");
    require(cfg.M >= 1 && cfg.M <= K, "M must lie in [1, K]");
    require(cfg.eta > 0.0, "eta must be positive");
    if (!cfg.quantizer.lossless) cfg.quantizer.validate();
    sample.spec.validate();
    const phy::PhyParams link = phy.with_delta(1.0 / static_cast<double>(cfg.M));
    link.validate();

    TrainLog log;
    log.seed = cfg.seed;
    Hasher hs;
    hash_common(hs, problem, sample, phy, cfg.quantizer);
    hs.add(std::uint64_t{1}).add(static_cast<std::uint64_t>(cfg.M)).add(cfg.eta);
    hs.add(static_cast<std::uint64_t>(cfg.rounds)).add(static_cast<std::uint64_t>(cfg.arch));
    hs.add(static_cast<std::uint64_t>(cfg.redraw_positions)).add(cfg.stop_loss.value_or(-1.0));
    log.config_hash = hs.add(cfg.seed).h;

    const auto n = problem.dim();
    Vector w = Vector::Zero(n);
    std::vector<Vector> e(K, Vector::Zero(n));
    std::vector<double> xs(K);
    std::vector<char> chosen(K);
    Vector agg(n);
    double clock = 0.0;
    log.initial_loss = problem.loss_gap(w);
    log.records.reserve(cfg.rounds);

    for (std::size_t t = 0; t < cfg.rounds; ++t) {
        refresh_positions(sample, cfg.redraw_positions, cfg.seed, t, xs);
        Schedule s = schedule_round(std::span<const double>(xs), cfg.M, cfg.arch);
        double bottleneck = 0.0;
        for (auto i : s.users) bottleneck = std::max(bottleneck, std::abs(xs[i] - s.z));
        const double latency = link.latency_at_offset(bottleneck);

        log.G2_measured = std::max(log.G2_measured, problem.local_grad_energy(w));
        std::fill(chosen.begin(), chosen.end(), 0);
        for (auto i : s.users) chosen[i] = 1;
        agg.setZero();
        for (std::size_t i = 0; i < K; ++i) {
            Engine rng = substream(cfg.seed, {kGradient, t, i});
            EfStep step = quantize_ef(problem.stochastic_gradient(i, w, rng), e[i], cfg.quantizer);
            e[i] = std::move(step.e_next);
            if (chosen[i]) agg += step.Y;
        }
        w -= (cfg.eta / static_cast<double>(cfg.M)) * agg;
        clock += latency;

        TrainRecord r;
        r.time = clock;
        r.index = t;
        r.tick = t;
        r.arch = cfg.arch;
        r.users = std::move(s.users);
        r.z = s.z;
        r.bottleneck = bottleneck;
        r.latency = latency;
        r.participants = cfg.M;
        r.loss = problem.loss_gap(w);
        r.grad_norm2 = problem.full_gradient(w).squaredNorm();
        const bool done = cfg.stop_loss && r.loss <= *cfg.stop_loss;
        log.records.push_back(std::move(r));
        if (done) break;
    }
    return log;
}

TrainLog run_afl(const SyntheticProblem& problem, const spatial::PositionSample& sample, const phy::PhyParams& phy,
                 const AflConfig& cfg) {
    const std::size_t K = problem.K();
    require(sample.size() == K, "position sample size must equal K");
    require(cfg.eta > 0.0, "eta must be positive");
    require(cfg.horizon_s > 0.0, "horizon must be positive");
    if (!cfg.quantizer.lossless) cfg.quantizer.validate();
    sample.spec.validate();
    cfg.model.validate();
    const double period = cfg.period > 0.0 ? cfg.period : cfg.model.T_d;
    require(period >= cfg.model.T_d, "trigger period must be at least T_d");
    const phy::PhyParams link = phy.with_delta(1.0);
    link.validate();

    TrainLog log;
    log.seed = cfg.seed;
    Hasher hs;
    hash_common(hs, problem, sample, phy, cfg.quantizer);
    hs.add(std::uint64_t{2}).add(cfg.model.T_d).add(static_cast<std::uint64_t>(cfg.model.compute.kind));
    hs.add(cfg.model.compute.t0).add(cfg.model.compute.rate).add(cfg.model.p_s).add(period).add(cfg.eta);
    hs.add(cfg.horizon_s).add(static_cast<std::uint64_t>(cfg.arch)).add(static_cast<std::uint64_t>(cfg.weighting));
    hs.add(static_cast<std::uint64_t>(cfg.redraw_positions)).add(cfg.stop_loss.value_or(-1.0));
    log.config_hash = hs.add(cfg.seed).h;

    struct Upload {
        double arrival;
        std::size_t user;
        double latency;
        double pi;
        Vector Y;
    };

    const auto n = problem.dim();
    Vector w = Vector::Zero(n);
    std::size_t version = 0;
    std::vector<Vector> cached(K, w);
    std::vector<std::size_t> cached_version(K, 0);
    std::vector<Vector> e(K, Vector::Zero(n));
    std::vector<double> xs(K);
    std::vector<Upload> pending;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    log.initial_loss = problem.loss_gap(w);
    const double T_d = cfg.model.T_d;

    for (std::size_t k = 0;; ++k) {
        const double t_k = static_cast<double>(k) * period;
        if (t_k >= cfg.horizon_s) break;
        refresh_positions(sample, cfg.redraw_positions, cfg.seed, k, xs);
        log.G2_measured = std::max(log.G2_measured, problem.local_grad_energy(w));

        pending.clear();
        double pi_sum = 0.0;
        for (std::size_t i = 0; i < K; ++i) {
            Engine grng = substream(cfg.seed, {kGate, k, i});
            const bool Z = unif(grng) < cfg.model.p_s;
            const double c = cfg.model.compute.sample(grng);
            const double offset = cfg.arch == Architecture::PA ? 0.0 : std::abs(xs[i]);
            const double tau = link.latency_at_offset(offset);
            const double pi = inclusion_probability(tau, cfg.model);
            const bool E = c + tau <= T_d;
            pi_sum += pi;

            Engine rng = substream(cfg.seed, {kGradient, k, i});
            EfStep step = quantize_ef(problem.stochastic_gradient(i, cached[i], rng), e[i], cfg.quantizer);
            e[i] = std::move(step.e_next);
            if (E && Z) {
                if (!(pi > 0.0)) throw ParameterError("sampled user with zero inclusion probability");
                pending.push_back({t_k + c + tau, i, c + tau, pi, std::move(step.Y)});
            }
        }
        std::sort(pending.begin(), pending.end(), [](const Upload& a, const Upload& b) {
            return a.arrival != b.arrival ? a.arrival < b.arrival : a.user < b.user;
        });
        const double pi_bar = pi_sum / static_cast<double>(K);

        bool done = false;
        for (auto& u : pending) {
            if (u.arrival > cfg.horizon_s) {
                done = true;
                break;
            }
            const double weight = cfg.weighting == Weighting::HT ? 1.0 / u.pi : 1.0 / pi_bar;
            w -= (cfg.eta * weight / static_cast<double>(K)) * u.Y;
            const std::size_t staleness = version - cached_version[u.user];
            ++version;
            cached[u.user] = w;
            cached_version[u.user] = version;
            log.delta_max = std::max(log.delta_max, staleness);

            TrainRecord r;
            r.time = u.arrival;
            r.index = version - 1;
            r.tick = k;
            r.arch = cfg.arch;
            r.users = {u.user};
            r.z = cfg.arch == Architecture::PA ? xs[u.user] : 0.0;
            r.bottleneck = std::abs(xs[u.user] - r.z);
            r.latency = u.latency;
            r.participants = pending.size();
            r.staleness = staleness;
            r.loss = problem.loss_gap(w);
            r.grad_norm2 = problem.full_gradient(w).squaredNorm();
            log.records.push_back(std::move(r));
            if (cfg.stop_loss && log.records.back().loss <= *cfg.stop_loss) {
                done = true;
                break;
            }
        }
        if (done) break;
    }
    return log;
}

}  // namespace pinchfl::flcore
