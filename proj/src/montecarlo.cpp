#include "pinchfl/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pinchfl/analytics.hpp"
#include "pinchfl/errors.hpp"
#include "pinchfl/parallel.hpp"

namespace pinchfl::montecarlo {

using detail::require;

std::string_view to_string(Mode m) { return m == Mode::SFL ? "sfl" : "afl"; }

std::string_view to_string(BoundKind k) {
    switch (k) {
        case BoundKind::TwoSided: return "two_sided";
        case BoundKind::Upper: return "upper";
        case BoundKind::Lower: return "lower";
        case BoundKind::Exact: return "exact";
    }
    return "?";
}

double Moments::std_error() const {
    if (n < 2.0) return 0.0;
    const double m = sum / n;
    const double var = std::max(0.0, (sum_sq - n * m * m) / (n - 1.0));
    return std::sqrt(var / n);
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    require(n >= 1, "grid needs at least one point");
    require(hi >= lo, "grid bounds out of order");
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * static_cast<double>(i);
    g.back() = hi;
    return g;
}

CcdfSeries estimate_ccdf(const CcdfRequest& req, const spatial::DistributionSpec& spec, const phy::PhyParams& phy) {
    require(req.trials >= 1, "trials must be at least 1");
    require(!req.grid.empty(), "grid must be nonempty");
    require(std::is_sorted(req.grid.begin(), req.grid.end()), "grid must be ascending");
    spec.validate();
    const bool sfl = req.mode == Mode::SFL;
    if (sfl) {
        require(req.M >= 1 && req.M <= req.K, "M must lie in [1, K]");
    } else {
        req.model.validate();
    }
    const phy::PhyParams link = phy.with_delta(sfl ? 1.0 / static_cast<double>(req.M) : 1.0);
    link.validate();
    const auto& grid = req.grid;

    using Hist = std::vector<std::uint64_t>;
    auto chunk = [&](std::uint64_t b, std::uint64_t e) {
        Hist h(grid.size() + 1, 0);
        std::vector<double> xs(sfl ? req.K : 1);
        for (std::uint64_t t = b; t < e; ++t) {
            Engine rng = substream(req.seed, {t});
            spatial::draw_positions(spec, rng, xs);
            double T;
            if (sfl) {
                double offset;
                if (req.arch == Architecture::CONV) {
                    offset = spatial::conv_bottleneck(xs, req.M);
                } else {
                    std::sort(xs.begin(), xs.end());
                    offset = spatial::pa_bottleneck_sorted(xs, req.M).pa_offset;
                }
                T = link.latency_at_offset(offset);
            } else {
                const double c = req.model.compute.sample(rng);
                const double offset = req.arch == Architecture::CONV ? std::abs(xs[0]) : 0.0;
                T = c + link.latency_at_offset(offset);
            }
            // number of grid points strictly below T
            ++h[static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), T) - grid.begin())];
        }
        return h;
    };
    auto fold = [](Hist& acc, const Hist& p) {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
    };
    const Hist h = ordered_reduce(req.trials, Hist(grid.size() + 1, 0), chunk, fold, req.threads);

    CcdfSeries out;
    out.grid = grid;
    out.trials = req.trials;
    out.seed = req.seed;
    out.ccdf.resize(grid.size());
    out.std_error.resize(grid.size());
    const double n = static_cast<double>(req.trials);
    std::uint64_t above = 0;
    for (std::size_t j = grid.size(); j-- > 0;) {
        above += h[j + 1];
        const double p = static_cast<double>(above) / n;
        out.ccdf[j] = p;
        out.std_error[j] = std::sqrt(p * (1.0 - p) / n);
    }
    return out;
}

namespace {


struct KAccumulator {
    std::vector<Moments> conv2;                 // per M
    std::vector<Moments> pa2;                   // per M
    std::vector<std::uint64_t> violations;      // per M
    std::vector<std::uint64_t> lower, upper, two_sided;   // per (M, eps)
    std::vector<Moments> span_mean, span_second;          // per m
    Moments min_spacing2;

    KAccumulator(std::size_t nM, std::size_t nE, std::size_t nm)
        : conv2(nM), pa2(nM), violations(nM, 0), lower(nM * nE, 0), upper(nM * nE, 0), two_sided(nM * nE, 0),
          span_mean(nm), span_second(nm) {}

    void merge(const KAccumulator& o) {
        for (std::size_t i = 0; i < conv2.size(); ++i) {
            conv2[i].merge(o.conv2[i]);
            pa2[i].merge(o.pa2[i]);
            violations[i] += o.violations[i];
        }
        for (std::size_t i = 0; i < lower.size(); ++i) {
            lower[i] += o.lower[i];
            upper[i] += o.upper[i];
            two_sided[i] += o.two_sided[i];
        }
        for (std::size_t i = 0; i < span_mean.size(); ++i) {
            span_mean[i].merge(o.span_mean[i]);
            span_second[i].merge(o.span_second[i]);
        }
        min_spacing2.merge(o.min_spacing2);
    }
};

BoundVerdict judge(std::string name, BoundKind kind, std::size_t K, std::size_t M, double eps, double analytic,
                   double empirical, double se, double z) {
    BoundVerdict v{std::move(name), kind, K, M, eps, analytic, empirical, se, false};
    switch (kind) {
        case BoundKind::TwoSided: v.pass = std::abs(empirical - analytic) <= z * se; break;
        case BoundKind::Upper: v.pass = empirical <= analytic + z * se; break;
        case BoundKind::Lower: v.pass = empirical >= analytic - z * se; break;
        case BoundKind::Exact: v.pass = empirical == analytic; break;
    }
    return v;
}

BoundVerdict judge_tail(std::string name, std::size_t K, std::size_t M, double eps, double bound, std::uint64_t hits,
                        std::uint64_t n, double z) {
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return judge(std::move(name), BoundKind::Upper, K, M, eps, bound, p, se, z);
}

}  // namespace

std::vector<BoundVerdict> verify_bounds(const VerifyRequest& req) {
    require(!req.K_grid.empty() && !req.M_grid.empty(), "grids must be nonempty");
    require(req.trials >= 2, "trials must be at least 2");
    require(req.D > 0.0, "D must be positive");
    const auto spec = spatial::DistributionSpec::uniform(req.D);
    const double half = 0.5 * req.D;
    std::vector<BoundVerdict> out;

    for (std::size_t ki = 0; ki < req.K_grid.size(); ++ki) {
        const std::size_t K = req.K_grid[ki];
        require(K >= 1, "K must be positive");
        std::vector<std::size_t> Ms;
        for (auto M : req.M_grid) {
            require(M >= 1, "M must be positive");
            if (M <= K) Ms.push_back(M);
        }
        std::vector<std::size_t> ms;
        for (auto M : Ms)
            if (M >= 2 && M - 1 <= K - 1) ms.push_back(M - 1);
        std::sort(ms.begin(), ms.end());
        ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
        const std::size_t nE = req.eps_grid.size();
        const double Kd = static_cast<double>(K);

        auto chunk = [&](std::uint64_t b, std::uint64_t e) {
            KAccumulator acc(Ms.size(), nE, ms.size());
            std::vector<double> xs(K), ys(K);
            for (std::uint64_t t = b; t < e; ++t) {
                Engine rng = substream(req.seed, {K, t});
                spatial::draw_positions(spec, rng, xs);
                std::sort(xs.begin(), xs.end());
                std::transform(xs.begin(), xs.end(), ys.begin(), [](double x) { return std::abs(x); });
                std::sort(ys.begin(), ys.end());
                for (std::size_t mi = 0; mi < Ms.size(); ++mi) {
                    const std::size_t M = Ms[mi];
                    const double Y = ys[M - 1];
                    const double half_L = spatial::pa_bottleneck_sorted(xs, M).pa_offset;
                    acc.conv2[mi].add(Y * Y);
                    acc.pa2[mi].add(half_L * half_L);
                    if (half_L > Y) ++acc.violations[mi];
                    const double p = static_cast<double>(M) / (Kd + 1.0);
                    const double Yn = Y / half;
                    for (std::size_t ei = 0; ei < nE; ++ei) {
                        const double eps = req.eps_grid[ei];
                        const std::size_t idx = mi * nE + ei;
                        if (Yn <= p - eps) ++acc.lower[idx];
                        if (Yn >= p + eps) ++acc.upper[idx];
                        if (std::abs(Yn - p) >= eps) ++acc.two_sided[idx];
                    }
                }
                for (std::size_t si = 0; si < ms.size(); ++si) {
                    const std::size_t m = ms[si];
                    double s1 = 0.0, s2 = 0.0;
                    for (std::size_t i = 0; i + m < K; ++i) {
                        const double s = (xs[i + m] - xs[i]) / req.D;
                        s1 += s;
                        s2 += s * s;
                    }
                    const double cnt = static_cast<double>(K - m);
                    acc.span_mean[si].add(s1 / cnt);
                    acc.span_second[si].add(s2 / cnt);
                }
                const double ms_min = spatial::min_simple_spacing_sorted(xs, req.D);
                acc.min_spacing2.add(ms_min * ms_min);
            }
            return acc;
        };
        auto fold = [](KAccumulator& a, const KAccumulator& p) { a.merge(p); };
        const KAccumulator acc =
            ordered_reduce(req.trials, KAccumulator(Ms.size(), nE, ms.size()), chunk, fold, req.threads);

        for (std::size_t mi = 0; mi < Ms.size(); ++mi) {
            const std::size_t M = Ms[mi];
            const auto rep = analytics::straggler_moments(K, M, req.D);
            const auto& c2 = acc.conv2[mi];
            const auto& p2 = acc.pa2[mi];
            out.push_back(judge("conv_second_moment", BoundKind::TwoSided, K, M, 0.0, rep.conv_E2, c2.mean(),
                                c2.std_error(), req.z));
            out.push_back(judge("pa_upper_bound", BoundKind::Upper, K, M, 0.0, rep.pa_ub, p2.mean(), p2.std_error(),
                                req.z));
            out.push_back(judge("pa_lower_bound", BoundKind::Lower, K, M, 0.0, rep.pa_lb, p2.mean(), p2.std_error(),
                                req.z));
            out.push_back(judge("ordering_violations", BoundKind::Exact, K, M, 0.0, 0.0,
                                static_cast<double>(acc.violations[mi]), 0.0, req.z));
            const double p = static_cast<double>(M) / (Kd + 1.0);
            for (std::size_t ei = 0; ei < nE; ++ei) {
                const double eps = req.eps_grid[ei];
                if (!(eps > 0.0)) continue;
                const std::size_t idx = mi * nE + ei;
                out.push_back(judge_tail("tail_hoeffding", K, M, eps, analytics::hoeffding_tail(K, eps),
                                         acc.two_sided[idx], req.trials, req.z));
                // the KL forms need p - eps > 0 and p + eps < 1
                if (!(eps < std::min(p, 1.0 - p))) continue;
                const auto tb = analytics::concentration_bounds(K, M, eps);
                out.push_back(
                    judge_tail("tail_kl_lower", K, M, eps, tb.kl_lower_tail, acc.lower[idx], req.trials, req.z));
                out.push_back(
                    judge_tail("tail_kl_upper", K, M, eps, tb.kl_upper_tail, acc.upper[idx], req.trials, req.z));
            }
        }
        for (std::size_t si = 0; si < ms.size(); ++si) {
            const std::size_t m = ms[si];
            const auto mp = analytics::span_moments(K, m);
            out.push_back(judge("span_mean", BoundKind::TwoSided, K, m + 1, 0.0, mp.mean, acc.span_mean[si].mean(),
                                acc.span_mean[si].std_error(), req.z));
            out.push_back(judge("span_second_moment", BoundKind::TwoSided, K, m + 1, 0.0, mp.second,
                                acc.span_second[si].mean(), acc.span_second[si].std_error(), req.z));
        }
        out.push_back(judge("min_spacing_second_moment", BoundKind::TwoSided, K, 0, 0.0,
                            analytics::min_spacing_second_moment(K), acc.min_spacing2.mean(),
                            acc.min_spacing2.std_error(), req.z));
    }
    return out;
}

std::vector<SweepRow> participation_sweep(const SweepRequest& req, const spatial::DistributionSpec& spec,
                                          const phy::PhyParams& phy) {
    require(!req.T_grid.empty(), "deadline grid must be nonempty");
    require(req.K >= 1, "K must be positive");
    require(req.trials >= 2, "trials must be at least 2");
    spec.validate();
    const phy::PhyParams link = phy.with_delta(1.0);
    link.validate();
    const std::size_t nT = req.T_grid.size();
    const double tau_pa = link.latency_at_offset(0.0);

    struct Acc {
        std::vector<Moments> conv, pa, gap;
    };
    auto chunk = [&](std::uint64_t b, std::uint64_t e) {
        Acc acc{std::vector<Moments>(nT), std::vector<Moments>(nT), std::vector<Moments>(nT)};
        std::vector<double> xs(req.K), need_conv(req.K), need_pa(req.K);
        for (std::uint64_t t = b; t < e; ++t) {
            Engine rng = substream(req.seed, {t});
            spatial::draw_positions(spec, rng, xs);
            for (std::size_t i = 0; i < req.K; ++i) {
                const double c = req.model.compute.sample(rng);
                need_conv[i] = c + link.latency_at_offset(std::abs(xs[i]));
                need_pa[i] = c + tau_pa;
            }
            for (std::size_t j = 0; j < nT; ++j) {
                const double T = req.T_grid[j];
                double nc = 0.0, np = 0.0;
                for (std::size_t i = 0; i < req.K; ++i) {
                    nc += need_conv[i] <= T ? 1.0 : 0.0;
                    np += need_pa[i] <= T ? 1.0 : 0.0;
                }
                acc.conv[j].add(nc);
                acc.pa[j].add(np);
                acc.gap[j].add(np - nc);
            }
        }
        return acc;
    };
    auto fold = [](Acc& a, const Acc& p) {
        for (std::size_t j = 0; j < a.conv.size(); ++j) {
            a.conv[j].merge(p.conv[j]);
            a.pa[j].merge(p.pa[j]);
            a.gap[j].merge(p.gap[j]);
        }
    };
    const Acc acc = ordered_reduce(
        req.trials, Acc{std::vector<Moments>(nT), std::vector<Moments>(nT), std::vector<Moments>(nT)}, chunk, fold,
        req.threads);

    std::vector<SweepRow> rows(nT);
    for (std::size_t j = 0; j < nT; ++j) {
        auto model = req.model;
        model.T_d = req.T_grid[j];
        const auto rep = participation::expected_participants(req.K, model.T_d, model, spec, phy);
        auto& r = rows[j];
        r.T_d = model.T_d;
        r.n_conv = rep.n_conv;
        r.n_pa = rep.n_pa;
        r.gap = rep.gap;
        r.mc_n_conv = acc.conv[j].mean();
        r.mc_n_pa = acc.pa[j].mean();
        r.mc_gap = acc.gap[j].mean();
        r.se_conv = acc.conv[j].std_error();
        r.se_pa = acc.pa[j].std_error();
        r.se_gap = acc.gap[j].std_error();
    }
    return rows;
}

}  // namespace pinchfl::montecarlo
