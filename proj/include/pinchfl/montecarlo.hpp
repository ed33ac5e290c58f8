#pragma once

// Monte Carlo estimators that confront the closed forms with draws: latency
// CCDFs, straggler moment bounds, spacing laws, tails and participation.
// Every trial draws from its own substream of the run seed.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pinchfl/flcore/training.hpp"
#include "pinchfl/participation.hpp"
#include "pinchfl/phy.hpp"
#include "pinchfl/spatial.hpp"

namespace pinchfl::montecarlo {

using flcore::Architecture;

enum class Mode { SFL, AFL };

std::string_view to_string(Mode m);

// Mean and standard error from running sums.
struct Moments {
    double n = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double x) {
        n += 1.0;
        sum += x;
        sum_sq += x * x;
    }
    void merge(const Moments& o) {
        n += o.n;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const { return n > 0.0 ? sum / n : 0.0; }
    double std_error() const;
};

struct CcdfSeries {
    std::vector<double> grid;
    std::vector<double> ccdf;     // P(T > grid[j])
    std::vector<double> std_error;  // binomial standard error
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

struct CcdfRequest {
    Mode mode = Mode::SFL;
    Architecture arch = Architecture::PA;
    std::size_t K = 40;
    std::size_t M = 7;                        // SFL
    participation::DeadlineModel model;       // AFL compute time
    std::uint64_t trials = 100000;
    std::vector<double> grid;                 // ascending
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

// SFL: K users per trial, round time c/R(bottleneck) with the 1/M share.
// AFL: one user per trial, compute time plus full-band uplink time.
// Equal seeds give paired CONV/PA series.
CcdfSeries estimate_ccdf(const CcdfRequest& req, const spatial::DistributionSpec& spec, const phy::PhyParams& phy);

// Latency grid spanning [lo, hi] with n points.
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

enum class BoundKind { TwoSided, Upper, Lower, Exact };

std::string_view to_string(BoundKind k);

struct BoundVerdict {
    std::string name;
    BoundKind kind = BoundKind::TwoSided;
    std::size_t K = 0;
    std::size_t M = 0;
    double eps = 0.0;
    double analytic = 0.0;
    double empirical = 0.0;
    double std_error = 0.0;
    bool pass = false;
};

struct VerifyRequest {
    std::vector<std::size_t> K_grid{40};
    std::vector<std::size_t> M_grid{7};
    std::vector<double> eps_grid{0.05, 0.1};
    double D = 10.0;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double z = 3.0;   // acceptance width in standard errors
};

// Per (K, M): E[Y_[M]^2] against its exact value, E[(L_M/2)^2] inside the
// upper/lower bounds, the L_M/2 <= Y_[M] ordering, tail probabilities of
// the normalized Y_[M]; per K: m-span moments and E[M_*^2]. All checks at a
// given K share one set of draws.
std::vector<BoundVerdict> verify_bounds(const VerifyRequest& req);

struct SweepRow {
    double T_d = 0.0;
    double n_conv = 0.0;
    double n_pa = 0.0;
    double gap = 0.0;
    double mc_n_conv = 0.0;
    double mc_n_pa = 0.0;
    double mc_gap = 0.0;
    double se_conv = 0.0;
    double se_pa = 0.0;
    double se_gap = 0.0;
};

struct SweepRequest {
    std::size_t K = 40;
    std::vector<double> T_grid;
    participation::DeadlineModel model;   // T_d is taken from T_grid
    std::uint64_t trials = 20000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

// Deadline-feasible participant counts (compute plus uplink within T_d),
// analytic and simulated. All deadlines reuse the same draws.
std::vector<SweepRow> participation_sweep(const SweepRequest& req, const spatial::DistributionSpec& spec,
                                          const phy::PhyParams& phy);

}  // namespace pinchfl::montecarlo
