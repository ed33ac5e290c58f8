#include "pinchfl/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "pinchfl/analytics.hpp"
#include "pinchfl/cli/config.hpp"
#include "pinchfl/cli/table.hpp"
#include "pinchfl/errors.hpp"
#include "pinchfl/flcore/convergence.hpp"
#include "pinchfl/flcore/sampling.hpp"
#include "pinchfl/montecarlo.hpp"
#include "pinchfl/participation.hpp"
#include "pinchfl/phy.hpp"

namespace pinchfl::cli {

namespace {

using Json = nlohmann::ordered_json;
using flcore::Architecture;

struct Result {
    Table table;
    Json metrics = Json::object();
};

std::string hex(std::uint64_t v) {
    char buf[17];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, 16);
    return std::string(buf, end);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

// Largest horizontal offset worth putting on a latency grid.
double max_offset(const RunConfig& c) {
    return c.dist == "gm" ? c.gm_mu + 6.0 * c.gm_sigma : 0.5 * c.D;
}

double compute_tail(const RunConfig& c) { return c.compute == "exponential" ? 10.0 / c.compute_rate : 0.0; }

Result cmd_ccdf(const RunConfig& c) {
    const auto spec = c.distribution();
    const auto phy = c.phy();
    const bool sfl = c.mode == "sfl";
    const auto link = phy.with_delta(sfl ? 1.0 / static_cast<double>(c.M) : 1.0);
    const double shift = sfl ? 0.0 : c.t0;
    const double lo = shift + link.latency_at_offset(0.0);
    const double hi = shift + compute_tail(c) + link.latency_at_offset(max_offset(c));
    const auto grid = montecarlo::linear_grid(0.98 * lo, 1.02 * hi, c.grid_points);

    std::vector<std::string> cols{"t"};
    std::vector<montecarlo::CcdfSeries> series;
    for (auto a : c.architectures()) {
        montecarlo::CcdfRequest req;
        req.mode = sfl ? montecarlo::Mode::SFL : montecarlo::Mode::AFL;
        req.arch = a;
        req.K = c.K;
        req.M = c.M;
        req.model = c.deadline_model();
        req.trials = c.trials;
        req.grid = grid;
        req.seed = c.seed;
        req.threads = c.threads;
        series.push_back(montecarlo::estimate_ccdf(req, spec, phy));
        const std::string tag = lower(flcore::to_string(a));
        cols.push_back("ccdf_" + tag);
        cols.push_back("se_" + tag);
    }
    Result r{Table(cols)};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        std::vector<Cell> row{grid[j]};
        for (const auto& s : series) {
            row.emplace_back(s.ccdf[j]);
            row.emplace_back(s.std_error[j]);
        }
        r.table.add(std::move(row));
    }
    r.metrics["mode"] = c.mode;
    r.metrics["trials"] = c.trials;
    r.metrics["grid_lo"] = grid.front();
    r.metrics["grid_hi"] = grid.back();
    if (series.size() == 2) {
        double worst = -1.0;
        bool dominated = true;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double diff = series[1].ccdf[j] - series[0].ccdf[j];
            const double se = std::hypot(series[0].std_error[j], series[1].std_error[j]);
            worst = std::max(worst, diff);
            dominated = dominated && diff <= 3.0 * se;
        }
        r.metrics["max_pa_minus_conv"] = worst;
        r.metrics["pa_dominates"] = dominated;
    }
    return r;
}

Result cmd_straggler(const RunConfig& c) {
    montecarlo::VerifyRequest req;
    req.K_grid = {c.K};
    req.M_grid.clear();
    for (std::size_t M = 1; M <= c.K; ++M) req.M_grid.push_back(M);
    req.eps_grid.clear();
    req.D = c.D;
    req.trials = c.trials;
    req.seed = c.seed;
    req.threads = c.threads;
    const auto verdicts = montecarlo::verify_bounds(req);

    Result r{Table({"M", "conv_E2", "pa_ub_avg", "pa_ub_beta", "pa_ub", "pa_lb", "ratio_limit", "mc_conv_E2",
                    "mc_conv_se", "mc_pa_E2", "mc_pa_se"})};
    std::map<std::size_t, const montecarlo::BoundVerdict*> conv, pa;
    std::uint64_t violations = 0;
    for (const auto& v : verdicts) {
        if (v.name == "conv_second_moment") conv[v.M] = &v;
        if (v.name == "pa_upper_bound") pa[v.M] = &v;
        if (v.name == "ordering_violations") violations += static_cast<std::uint64_t>(v.empirical);
    }
    for (std::size_t M = 1; M <= c.K; ++M) {
        const auto s = analytics::straggler_moments(c.K, M, c.D);
        r.table.add({static_cast<std::int64_t>(M), s.conv_E2, s.pa_ub_avg, s.pa_ub_beta, s.pa_ub, s.pa_lb,
                     s.ratio_limit, conv[M]->empirical, conv[M]->std_error, pa[M]->empirical, pa[M]->std_error});
    }
    const auto s = analytics::straggler_moments(c.K, c.M, c.D);
    r.metrics["K"] = c.K;
    r.metrics["M"] = c.M;
    r.metrics["conv_E2"] = s.conv_E2;
    r.metrics["pa_ub"] = s.pa_ub;
    r.metrics["pa_lb"] = s.pa_lb;
    r.metrics["mc_conv_E2"] = conv[c.M]->empirical;
    r.metrics["mc_pa_E2"] = pa[c.M]->empirical;
    r.metrics["ordering_violations"] = violations;
    return r;
}

Result cmd_participation(const RunConfig& c) {
    const auto spec = c.distribution();
    const auto phy = c.phy();
    const auto model = c.deadline_model();
    const double T_min = c.t0 + phy.latency_at_offset(0.0);
    const double T_max = c.t0 + compute_tail(c) + phy.latency_at_offset(max_offset(c));
    const double pad = 0.1 * (T_max - T_min);

    montecarlo::SweepRequest req;
    req.K = c.K;
    req.T_grid = montecarlo::linear_grid(std::max(0.0, T_min - pad), T_max + pad, c.grid_points);
    req.model = model;
    req.trials = c.trials;
    req.seed = c.seed;
    req.threads = c.threads;
    const auto rows = montecarlo::participation_sweep(req, spec, phy);

    Result r{Table({"T_d", "n_conv", "n_pa", "gap", "mc_n_conv", "mc_n_pa", "mc_gap", "se_conv", "se_pa", "se_gap"})};
    bool dominance = true;
    double max_gap = 0.0, at = 0.0;
    for (const auto& row : rows) {
        r.table.add({row.T_d, row.n_conv, row.n_pa, row.gap, row.mc_n_conv, row.mc_n_pa, row.mc_gap, row.se_conv,
                     row.se_pa, row.se_gap});
        dominance = dominance && row.n_pa >= row.n_conv;
        if (row.gap > max_gap) {
            max_gap = row.gap;
            at = row.T_d;
        }
    }
    r.metrics["T_min"] = T_min;
    r.metrics["T_max"] = T_max;
    if (c.compute == "deterministic") {
        const auto cr = participation::coverage_radius(c.T_d, model, phy);
        r.metrics["kappa"] = cr.kappa;
        r.metrics["rho_at_deadline"] = cr.rho;
    }
    r.metrics["max_gap"] = max_gap;
    r.metrics["max_gap_deadline"] = at;
    r.metrics["dominance"] = dominance;
    return r;
}

Result cmd_highsnr(const RunConfig& c) {
    const auto k = phy::high_snr_constants(c.D, c.d);
    const double L_star = phy::lambda_star(k);
    const auto phy = c.phy();
    const double lo = k.Lambda0, hi = std::max(2.0 * L_star, 10.0 * k.Lambda0);
    Result r{Table({"Lambda", "envelope", "gap_bracket", "inverse_rate_gap", "time_gain_lb"})};
    const std::size_t n = c.grid_points;
    for (std::size_t i = 0; i < n; ++i) {
        const double L = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
        r.table.add({L, phy::remainder_envelope(L, k), phy::afl_gap_bracket(L, k),
                     phy::afl_inverse_rate_gap(L, c.D, c.d), phy::afl_time_gain_lb(c.K, phy, L)});
    }
    const double L_cfg = std::log2(phy.S);
    r.metrics["zeta"] = k.zeta;
    r.metrics["C0"] = k.C0;
    r.metrics["C1"] = k.C1;
    r.metrics["Lambda0"] = k.Lambda0;
    r.metrics["g_zeta"] = k.g_zeta;
    r.metrics["ell_conv"] = k.ell_conv;
    r.metrics["Lambda_star"] = L_star;
    r.metrics["Lambda_config"] = L_cfg;
    r.metrics["config_in_regime"] = L_cfg >= k.Lambda0;
    return r;
}

std::string join_users(const std::vector<std::size_t>& users) {
    std::string s;
    for (auto u : users) {
        if (!s.empty()) s += ' ';
        s += std::to_string(u);
    }
    return s;
}

Result cmd_train(const RunConfig& c) {
    const auto spec = c.distribution();
    const auto phy = c.phy();
    const auto q = c.quantizer();
    const auto problem = flcore::make_synthetic_problem(c.K, c.dim, c.delta2, std::sqrt(c.sigma2),
                                                        substream_seed(c.seed, {1}), c.center);
    const auto sample = spatial::sample_positions(spec, c.K, substream_seed(c.seed, {2}));
    const bool sfl = c.mode == "sfl";
    std::optional<double> stop;
    if (c.target > 0.0) stop = c.target;

    Result r{Table({"arch", "index", "tick", "time", "users", "z", "bottleneck", "latency", "participants",
                    "staleness", "loss", "grad_norm2"})};
    r.metrics["mode"] = c.mode;
    r.metrics["initial_loss"] = problem.loss_gap(flcore::Vector::Zero(problem.dim()));
    r.metrics["delta2"] = problem.delta2;
    r.metrics["sigma2"] = problem.sigma2();
    std::map<Architecture, double> reach;
    for (auto a : c.architectures()) {
        flcore::TrainLog log;
        flcore::ConvergenceInputs in;
        in.L = problem.L();
        in.eta = c.eta;
        in.quantizer = q;
        in.sigma2 = problem.sigma2();
        in.delta2 = problem.delta2;
        double pi_min = 1.0;
        if (sfl) {
            flcore::SflConfig sc;
            sc.M = c.M;
            sc.eta = c.eta;
            sc.quantizer = q;
            sc.rounds = c.rounds;
            sc.arch = a;
            sc.seed = c.seed;
            sc.stop_loss = stop;
            log = flcore::run_sfl(problem, sample, phy, sc);
        } else {
            flcore::AflConfig ac;
            ac.model = c.deadline_model();
            ac.period = c.period;
            ac.eta = c.eta;
            ac.quantizer = q;
            ac.horizon_s = c.horizon;
            ac.arch = a;
            ac.weighting = c.weighting == "ht" ? flcore::Weighting::HT : flcore::Weighting::Uniform;
            ac.seed = c.seed;
            ac.stop_loss = stop;
            log = flcore::run_afl(problem, sample, phy, ac);
            const double worst = a == Architecture::PA ? 0.0 : max_offset(c);
            const double tau = phy.latency_at_offset(worst);
            pi_min = tau <= c.T_d ? flcore::inclusion_probability(tau, ac.model) : 0.0;
            in.delta_max = static_cast<double>(log.delta_max);
        }
        in.G2 = log.G2_measured;

        const std::string tag(flcore::to_string(a));
        for (const auto& rec : log.records) {
            r.table.add({tag, static_cast<std::int64_t>(rec.index), static_cast<std::int64_t>(rec.tick), rec.time,
                         join_users(rec.users), rec.z, rec.bottleneck, rec.latency,
                         static_cast<std::int64_t>(rec.participants), static_cast<std::int64_t>(rec.staleness),
                         rec.loss, rec.grad_norm2});
        }
        Json m = Json::object();
        m["events"] = log.records.size();
        m["total_time"] = log.total_time();
        m["final_loss"] = log.records.empty() ? problem.loss_gap(flcore::Vector::Zero(problem.dim()))
                                              : log.records.back().loss;
        const auto t = stop ? log.time_to_loss(*stop) : std::nullopt;
        m["time_to_target"] = t ? Json(*t) : Json(nullptr);
        if (t) reach[a] = *t;
        m["delta_max"] = log.delta_max;
        m["G2_measured"] = log.G2_measured;
        m["config_hash"] = hex(log.config_hash);
        m["pi_min"] = pi_min;
        if (pi_min > 0.0) {
            in.xi = flcore::xi_safe(c.K, pi_min);
            const auto rep = flcore::convergence_constants(in);
            m["xi_safe"] = rep.xi_safe;
            m["eta_max"] = rep.eta_max;
            m["rho_b"] = rep.rho_b;
            m["lambda_min"] = rep.lambda_min;
            m["variance_floor"] = rep.variance_floor;
            m["ef_floor"] = rep.ef_floor;
            m["eta_max_stale"] = rep.eta_max_stale ? Json(*rep.eta_max_stale) : Json(nullptr);
        } else {
            m["xi_safe"] = nullptr;
            m["eta_max_stale"] = sfl ? Json(nullptr)
                                     : Json(flcore::eta_max_stale(problem.L(), static_cast<double>(log.delta_max)));
        }
        r.metrics[lower(tag)] = std::move(m);
    }
    if (reach.size() == 2) r.metrics["speedup"] = reach[Architecture::CONV] / reach[Architecture::PA];
    return r;
}

Result cmd_verify(const RunConfig& c, std::ostream& out) {
    montecarlo::VerifyRequest req;
    req.K_grid = c.k_list.empty() ? std::vector<std::size_t>{c.K} : c.k_list;
    req.M_grid = c.m_list.empty() ? std::vector<std::size_t>{c.M} : c.m_list;
    req.eps_grid = c.eps;
    req.D = c.D;
    req.trials = c.trials;
    req.seed = c.seed;
    req.threads = c.threads;
    const auto verdicts = montecarlo::verify_bounds(req);

    Result r{Table({"name", "kind", "K", "M", "eps", "analytic", "empirical", "std_error", "pass"})};
    std::size_t failed = 0;
    for (const auto& v : verdicts) {
        r.table.add({v.name, std::string(montecarlo::to_string(v.kind)), static_cast<std::int64_t>(v.K),
                     static_cast<std::int64_t>(v.M), v.eps, v.analytic, v.empirical, v.std_error,
                     static_cast<std::int64_t>(v.pass)});
        if (!v.pass) {
            ++failed;
            out << "FAIL " << v.name << " K=" << v.K << " M=" << v.M << " eps=" << format_number(v.eps)
                << " analytic=" << format_number(v.analytic) << " empirical=" << format_number(v.empirical) << '\n';
        }
    }
    r.metrics["checks"] = verdicts.size();
    r.metrics["failed"] = failed;
    r.metrics["all_pass"] = failed == 0;
    return r;
}

const std::vector<std::pair<std::string, std::string>>& subcommands() {
    static const std::vector<std::pair<std::string, std::string>> cmds{
        {"ccdf", "latency CCDF under CONV and PA"},
        {"straggler", "straggler moments and bounds for M = 1..K"},
        {"participation", "expected participants across a deadline sweep"},
        {"highsnr", "high-SNR constants and AFL gap bracket"},
        {"train", "SFL or AFL training on synthetic quadratics"},
        {"verify", "Monte Carlo verification of the straggler bounds"},
    };
    return cmds;
}

void write_outputs(const std::string& command, const RunConfig& c, const Result& r) {
    const std::filesystem::path dir(c.out);
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / (command + ".csv"), std::ios::binary);
        write_csv(csv, r.table);
        if (!csv) throw std::runtime_error("cannot write " + (dir / (command + ".csv")).string());
    }
    Json j = Json::object();
    j["command"] = command;
    j["config"] = config_echo(c);
    j["seed"] = c.seed;
    j["metrics"] = r.metrics;
    j["series"] = series_json(r.table);
    std::ofstream js(dir / (command + ".json"), std::ios::binary);
    js << j.dump(2) << '\n';
    if (!js) throw std::runtime_error("cannot write " + (dir / (command + ".json")).string());
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pinching-antenna FL latency, participation and training experiments", "pinchfl"};
    std::string config_path;
    app.add_option("--config", config_path, "key = value file applied before flags");
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> flags;
    for (const auto& k : config_keys())
        flags.emplace_back(k.name, app.add_option("--" + k.name, values[k.name], k.help));
    for (const auto& [name, desc] : subcommands()) app.add_subcommand(name, desc)->fallthrough();
    app.require_subcommand(1);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    std::string command;
    for (const auto& [name, desc] : subcommands())
        if (app.got_subcommand(name)) command = name;

    RunConfig cfg;
    try {
        std::map<std::string, std::string> overrides;
        for (const auto& [name, opt] : flags)
            if (opt->count() > 0) overrides[name] = values[name];
        cfg = load_config(config_path, overrides);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfig;
    }

    try {
        Result r = command == "ccdf"            ? cmd_ccdf(cfg)
                   : command == "straggler"     ? cmd_straggler(cfg)
                   : command == "participation" ? cmd_participation(cfg)
                   : command == "highsnr"       ? cmd_highsnr(cfg)
                   : command == "train"         ? cmd_train(cfg)
                                                : cmd_verify(cfg, out);
        write_outputs(command, cfg, r);
        out << "wrote " << (std::filesystem::path(cfg.out) / (command + ".csv")).string() << " and "
            << (std::filesystem::path(cfg.out) / (command + ".json")).string() << '\n';
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}

}  // namespace pinchfl::cli
