#pragma once

// Synchronous and asynchronous FL on a SyntheticProblem with the uplink
// timing of a CONV (radiator at z = 0) or PA (radiator moved per round or
// per uploader) access point.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "pinchfl/flcore/problem.hpp"
#include "pinchfl/flcore/quantizer.hpp"
#include "pinchfl/participation.hpp"
#include "pinchfl/phy.hpp"
#include "pinchfl/spatial.hpp"

namespace pinchfl::flcore {

enum class Architecture { CONV, PA };
enum class Weighting { HT, Uniform };

std::string_view to_string(Architecture a);
std::string_view to_string(Weighting w);

struct Schedule {
    std::vector<std::size_t> users;  // ascending
    double z = 0.0;
};

Schedule schedule_round(std::span<const double> xs, std::size_t M, Architecture arch);
Schedule schedule_round(const spatial::PositionSample& sample, std::size_t M, Architecture arch);

struct TrainRecord {
    double time = 0.0;               // wall clock at the end of the event (s)
    std::size_t index = 0;           // round (SFL) or applied update (AFL)
    std::size_t tick = 0;            // trigger tick (AFL), equals index for SFL
    Architecture arch = Architecture::CONV;
    std::vector<std::size_t> users;  // scheduled set (SFL) or the uploader (AFL)
    double z = 0.0;
    double bottleneck = 0.0;         // worst |x - z| among the users above
    double latency = 0.0;            // round time (SFL) or compute + uplink (AFL)
    std::size_t participants = 0;
    std::size_t staleness = 0;
    double loss = 0.0;               // F(w) - F* after the event
    double grad_norm2 = 0.0;         // ||grad F(w)||^2 after the event
};

struct TrainLog {
    std::vector<TrainRecord> records;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    double initial_loss = 0.0;
    std::size_t delta_max = 0;       // largest staleness applied
    double G2_measured = 0.0;        // sup of (1/K) sum ||grad f_i||^2 over the run

    // Wall clock of the first event with loss <= target.
    std::optional<double> time_to_loss(double target) const;
    double total_time() const { return records.empty() ? 0.0 : records.back().time; }
};

struct SflConfig {
    std::size_t M = 7;
    double eta = 0.1;
    QuantizerSpec quantizer;
    std::size_t rounds = 100;
    Architecture arch = Architecture::PA;
    std::uint64_t seed = 1;
    bool redraw_positions = true;    // fresh positions each round from sample.spec
    std::optional<double> stop_loss;
};

// `phy` carries the full-band budget; the 1/M share is applied here.
TrainLog run_sfl(const SyntheticProblem& problem, const spatial::PositionSample& sample, const phy::PhyParams& phy,
                 const SflConfig& cfg);

struct AflConfig {
    participation::DeadlineModel model;
    double period = 0.0;             // trigger spacing; 0 means T_d
    double eta = 0.1;
    QuantizerSpec quantizer;
    double horizon_s = 100.0;
    Architecture arch = Architecture::PA;
    Weighting weighting = Weighting::HT;
    std::uint64_t seed = 1;
    bool redraw_positions = true;    // fresh positions each tick from sample.spec
    std::optional<double> stop_loss;
};

// Uses the full band (delta = 1) regardless of phy.delta.
TrainLog run_afl(const SyntheticProblem& problem, const spatial::PositionSample& sample, const phy::PhyParams& phy,
                 const AflConfig& cfg);

}  // namespace pinchfl::flcore
