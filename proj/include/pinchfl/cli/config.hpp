#pragma once

// Run configuration shared by every subcommand. Values come from built-in
// defaults, then an optional `key = value` file, then command-line flags.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pinchfl/flcore/training.hpp"
#include "pinchfl/montecarlo.hpp"
#include "pinchfl/participation.hpp"
#include "pinchfl/phy.hpp"
#include "pinchfl/spatial.hpp"

namespace pinchfl::cli {

struct RunConfig {
    // population and geometry
    std::size_t K = 40;
    std::size_t M = 7;
    double D = 10.0;
    double d = 3.0;
    std::string dist = "uniform";   // uniform | gm
    double gm_mu = 2.5;
    double gm_sigma = 1.0;

    // link budget
    double P = 1.0;
    double sigma_n2 = 1e-7;
    double f_c = 28e9;
    double W = 1e6;

    // payload and compression
    std::size_t dim = 1000;
    int bits = 6;
    double c_q = 9.0;
    double payload_bits = 0.0;      // 0: dim * bits

    // deadline model
    double T_d = 0.0225;
    double t0 = 0.01;
    std::string compute = "deterministic";   // deterministic | exponential
    double compute_rate = 100.0;
    double p_s = 1.0;
    double period = 0.0;            // 0: T_d

    // training
    double eta = 0.2;
    std::size_t rounds = 200;
    double horizon = 5.0;
    double target = 1e-3;           // stop once F - F* <= target; 0 disables
    double delta2 = 1e-3;
    double sigma2 = 1e-3;
    double center = 10.0;
    std::string mode = "sfl";       // sfl | afl
    std::string arch = "both";      // conv | pa | both
    std::string weighting = "ht";   // ht | uniform

    // Monte Carlo and output
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::size_t grid_points = 100;
    std::vector<std::size_t> k_list;   // verify: overrides k when set
    std::vector<std::size_t> m_list;   // verify: overrides m when set
    std::vector<double> eps{0.05, 0.1};
    std::string out = ".";

    double payload() const { return payload_bits > 0.0 ? payload_bits : static_cast<double>(dim) * bits; }
    spatial::DistributionSpec distribution() const;
    participation::DeadlineModel deadline_model() const;
    phy::PhyParams phy() const;   // full band; callers apply their own share
    flcore::QuantizerSpec quantizer() const;
    std::vector<flcore::Architecture> architectures() const;
};

struct KeyInfo {
    std::string name;
    std::string help;
    std::function<void(RunConfig&, std::string_view)> set;   // throws ConfigError naming the key
    std::function<nlohmann::ordered_json(const RunConfig&)> get;
};

const std::vector<KeyInfo>& config_keys();

// Applies one `key = value` assignment; unknown keys and malformed values
// throw ConfigError.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

// Throws ConfigError naming the first offending key.
void validate(const RunConfig& cfg);

// Reads `key = value` lines ('#' starts a comment) from `path` when it is
// nonempty, applies `overrides` on top and validates the result.
RunConfig load_config(const std::string& path, const std::map<std::string, std::string>& overrides);

nlohmann::ordered_json config_echo(const RunConfig& cfg);

}  // namespace pinchfl::cli
