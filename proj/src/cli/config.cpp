#include "pinchfl/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <type_traits>

#include "pinchfl/errors.hpp"

namespace pinchfl::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, std::string_view text) {
    text = trim(text);
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && text.front() == '+') ++first;
    if constexpr (std::is_unsigned_v<T>) {
        if (first != last && *first == '-') throw ConfigError(key, "expected a nonnegative integer, got '" + std::string(text) + "'");
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last)
        throw ConfigError(key, "malformed value '" + std::string(text) + "'");
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) throw ConfigError(key, "value must be finite");
    }
    return value;
}

template <class T>
KeyInfo number_key(const char* name, const char* help, T RunConfig::*field) {
    return {name, help,
            [field, key = std::string(name)](RunConfig& c, std::string_view v) { c.*field = parse_number<T>(key, v); },
            [field](const RunConfig& c) { return nlohmann::ordered_json(c.*field); }};
}

KeyInfo choice_key(const char* name, const char* help, std::string RunConfig::*field,
                   std::initializer_list<const char*> choices) {
    std::vector<std::string> allowed(choices.begin(), choices.end());
    return {name, help,
            [field, allowed, key = std::string(name)](RunConfig& c, std::string_view v) {
                const std::string s(trim(v));
                if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
                    std::string list;
                    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
                    throw ConfigError(key, "expected one of {" + list + "}, got '" + s + "'");
                }
                c.*field = s;
            },
            [field](const RunConfig& c) { return nlohmann::ordered_json(c.*field); }};
}

template <class T>
KeyInfo list_key(const char* name, const char* help, std::vector<T> RunConfig::*field) {
    return {name, help,
            [field, key = std::string(name)](RunConfig& c, std::string_view v) {
                std::vector<T> out;
                v = trim(v);
                while (!v.empty()) {
                    const auto comma = v.find(',');
                    out.push_back(parse_number<T>(key, v.substr(0, comma)));
                    if (comma == std::string_view::npos) break;
                    v.remove_prefix(comma + 1);
                }
                c.*field = std::move(out);
            },
            [field](const RunConfig& c) { return nlohmann::ordered_json(c.*field); }};
}

std::vector<KeyInfo> build_keys() {
    std::vector<KeyInfo> k;
    k.push_back(number_key("k", "number of users K", &RunConfig::K));
    k.push_back(number_key("m", "scheduled users per SFL round", &RunConfig::M));
    k.push_back(number_key("corridor", "corridor length D (m)", &RunConfig::D));
    k.push_back(number_key("height", "waveguide height d (m)", &RunConfig::d));
    k.push_back(choice_key("dist", "user position law", &RunConfig::dist, {"uniform", "gm"}));
    k.push_back(number_key("gm_mu", "mixture cluster offset (m)", &RunConfig::gm_mu));
    k.push_back(number_key("gm_sigma", "mixture cluster std (m)", &RunConfig::gm_sigma));
    k.push_back(number_key("power", "transmit power P (W)", &RunConfig::P));
    k.push_back(number_key("sigma_n2", "noise power (W)", &RunConfig::sigma_n2));
    k.push_back(number_key("fc", "carrier frequency (Hz)", &RunConfig::f_c));
    k.push_back(number_key("bandwidth", "bandwidth W (Hz)", &RunConfig::W));
    k.push_back(number_key("dim", "model dimension d_w", &RunConfig::dim));
    k.push_back(number_key("bits", "quantizer bits per coordinate", &RunConfig::bits));
    k.push_back(number_key("cq", "quantizer high-rate constant", &RunConfig::c_q));
    k.push_back(number_key("payload_bits", "upload size B_t in bits (0: dim * bits)", &RunConfig::payload_bits));
    k.push_back(number_key("deadline", "per-upload deadline T_d (s)", &RunConfig::T_d));
    k.push_back(number_key("t0", "minimum compute time (s)", &RunConfig::t0));
    k.push_back(choice_key("compute", "compute time law", &RunConfig::compute, {"deterministic", "exponential"}));
    k.push_back(number_key("compute_rate", "exponential compute rate (1/s)", &RunConfig::compute_rate));
    k.push_back(number_key("p_s", "trigger response probability", &RunConfig::p_s));
    k.push_back(number_key("period", "AFL trigger period (s, 0: deadline)", &RunConfig::period));
    k.push_back(number_key("eta", "stepsize", &RunConfig::eta));
    k.push_back(number_key("rounds", "SFL round budget", &RunConfig::rounds));
    k.push_back(number_key("horizon", "AFL wall-clock horizon (s)", &RunConfig::horizon));
    k.push_back(number_key("target", "stop once F - F* <= target (0: never)", &RunConfig::target));
    k.push_back(number_key("delta2", "data heterogeneity", &RunConfig::delta2));
    k.push_back(number_key("sigma2", "gradient noise variance", &RunConfig::sigma2));
    k.push_back(number_key("center", "distance of the optimum from the start", &RunConfig::center));
    k.push_back(choice_key("mode", "training or latency mode", &RunConfig::mode, {"sfl", "afl"}));
    k.push_back(choice_key("arch", "access point architecture", &RunConfig::arch, {"conv", "pa", "both"}));
    k.push_back(choice_key("weighting", "AFL aggregation weights", &RunConfig::weighting, {"ht", "uniform"}));
    k.push_back(number_key("trials", "Monte Carlo trials", &RunConfig::trials));
    k.push_back(number_key("seed", "run seed", &RunConfig::seed));
    k.push_back(number_key("threads", "worker threads (0: all cores)", &RunConfig::threads));
    k.push_back(number_key("grid_points", "points on latency/deadline/Lambda grids", &RunConfig::grid_points));
    k.push_back(list_key("k_list", "verify: comma-separated K values", &RunConfig::k_list));
    k.push_back(list_key("m_list", "verify: comma-separated M values", &RunConfig::m_list));
    k.push_back(list_key("eps", "verify: comma-separated tail margins", &RunConfig::eps));
    k.push_back({"out", "output directory",
                 [](RunConfig& c, std::string_view v) {
                     v = trim(v);
                     if (v.empty()) throw ConfigError("out", "output directory must not be empty");
                     c.out = std::string(v);
                 },
                 [](const RunConfig& c) { return nlohmann::ordered_json(c.out); }});
    return k;
}

void check(bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key, what);
}

}  // namespace

const std::vector<KeyInfo>& config_keys() {
    static const std::vector<KeyInfo> keys = build_keys();
    return keys;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
    const auto& keys = config_keys();
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const KeyInfo& k) { return k.name == key; });
    if (it == keys.end()) throw ConfigError(std::string(key), "unknown key");
    it->set(cfg, value);
}

void validate(const RunConfig& c) {
    check(c.K >= 1, "k", "K must be at least 1");
    check(c.M >= 1 && c.M <= c.K, "m", "M must lie in [1, K]");
    check(c.D > 0.0, "corridor", "corridor length must be positive");
    check(c.d > 0.0, "height", "waveguide height must be positive");
    check(c.gm_mu >= 0.0, "gm_mu", "mixture offset must be nonnegative");
    check(c.gm_sigma > 0.0, "gm_sigma", "mixture std must be positive");
    check(c.P > 0.0, "power", "transmit power must be positive");
    check(c.sigma_n2 > 0.0, "sigma_n2", "noise power must be positive");
    check(c.f_c > 0.0, "fc", "carrier frequency must be positive");
    check(c.W > 0.0, "bandwidth", "bandwidth must be positive");
    check(c.dim >= 1, "dim", "model dimension must be at least 1");
    check(c.bits >= 1 && c.bits <= 52, "bits", "bits must lie in [1, 52]");
    check(c.c_q > 0.0, "cq", "c_q must be positive");
    check(c.payload_bits >= 0.0, "payload_bits", "payload must be nonnegative");
    check(c.T_d >= 0.0, "deadline", "deadline must be nonnegative");
    check(c.t0 >= 0.0, "t0", "t0 must be nonnegative");
    check(c.compute_rate > 0.0, "compute_rate", "compute rate must be positive");
    check(c.p_s > 0.0 && c.p_s <= 1.0, "p_s", "p_s must lie in (0, 1]");
    check(c.period >= 0.0, "period", "period must be nonnegative");
    check(c.period == 0.0 || c.period >= c.T_d, "period", "period must be at least the deadline");
    check(c.eta > 0.0, "eta", "stepsize must be positive");
    check(c.rounds >= 1, "rounds", "rounds must be at least 1");
    check(c.horizon > 0.0, "horizon", "horizon must be positive");
    check(c.target >= 0.0, "target", "target must be nonnegative");
    check(c.delta2 >= 0.0, "delta2", "heterogeneity must be nonnegative");
    check(c.delta2 == 0.0 || c.K >= 2, "delta2", "heterogeneity needs at least two users");
    check(c.sigma2 >= 0.0, "sigma2", "noise variance must be nonnegative");
    check(c.center >= 0.0, "center", "center distance must be nonnegative");
    check(c.trials >= 2, "trials", "trials must be at least 2");
    check(c.grid_points >= 2, "grid_points", "grids need at least 2 points");
    for (auto k : c.k_list) check(k >= 1, "k_list", "every K must be at least 1");
    for (auto m : c.m_list) check(m >= 1, "m_list", "every M must be at least 1");
    check(!c.eps.empty(), "eps", "need at least one tail margin");
    for (auto e : c.eps) check(e > 0.0 && e < 1.0, "eps", "tail margins must lie in (0, 1)");
    try {
        (void)c.phy();
    } catch (const ParameterError& e) {
        throw ConfigError("sigma_n2", e.what());
    }
}

RunConfig load_config(const std::string& path, const std::map<std::string, std::string>& overrides) {
    RunConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config", "cannot read '" + path + "'");
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string_view s(line);
            if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
            s = trim(s);
            if (s.empty()) continue;
            const auto eq = s.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError("config", "line " + std::to_string(lineno) + ": expected 'key = value'");
            apply_setting(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
        }
    }
    for (const auto& [key, value] : overrides) apply_setting(cfg, key, value);
    validate(cfg);
    return cfg;
}

nlohmann::ordered_json config_echo(const RunConfig& cfg) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& k : config_keys()) j[k.name] = k.get(cfg);
    return j;
}

spatial::DistributionSpec RunConfig::distribution() const {
    spatial::DistributionSpec s;
    if (dist == "gm") {
        s.kind = spatial::DistributionKind::GaussianMixture;
        s.mu = gm_mu;
        s.sigma = gm_sigma;
    }
    s.D = D;
    return s;
}

participation::DeadlineModel RunConfig::deadline_model() const {
    participation::DeadlineModel m;
    m.T_d = T_d;
    m.compute = compute == "exponential" ? participation::ComputeTime::shifted_exponential(t0, compute_rate)
                                         : participation::ComputeTime::deterministic(t0);
    m.p_s = p_s;
    return m;
}

phy::PhyParams RunConfig::phy() const {
    return phy::PhyParams::from_link_budget(P, sigma_n2, f_c, d, D, W, payload(), 1.0);
}

flcore::QuantizerSpec RunConfig::quantizer() const { return flcore::QuantizerSpec::make(bits, c_q); }

std::vector<flcore::Architecture> RunConfig::architectures() const {
    if (arch == "conv") return {flcore::Architecture::CONV};
    if (arch == "pa") return {flcore::Architecture::PA};
    return {flcore::Architecture::CONV, flcore::Architecture::PA};
}

}  // namespace pinchfl::cli
