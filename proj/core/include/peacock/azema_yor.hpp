#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "peacock/measure.hpp"
#include "peacock/time_family.hpp"

namespace peacock {

// ============================================================================
// Barrier embedding of a family into Brownian motion.
//
// Each marginal is embedded by stopping the path the first time the running
// maximum reaches the law's barycentre function evaluated at the current
// position. For residual-monotone families the barriers are nested, so the
// per-path search resumes where the previous marginal stopped; the stopped
// values then form a discrete martingale with the family as its marginals.
// ============================================================================

struct PathConfig {
    double dt = 1e-3;
    double horizon = 1e4;
    std::size_t paths = 100000;
    std::uint64_t seed = 0;
    // 0 reads PEACOCK_THREADS, else runs single-threaded. Path i uses stream
    // (seed, i) regardless of the worker count, so results never depend on it.
    int threads = 0;
};

struct EmbeddingReport {
    std::vector<double> times;
    // stopped[k][i] and stop_times[k][i] describe path i at times[k]
    std::vector<std::vector<double>> stopped;
    std::vector<std::vector<double>> stop_times;
    // a censored path exhausted the horizon before crossing some barrier;
    // its entries from that time on hold the horizon state, never dropped
    std::vector<char> censored;
    std::size_t censored_paths = 0;
    // pairs are consecutive (t_k, t_{k+1}) per path; a violation means the
    // later barrier was crossed strictly before the earlier one
    std::size_t monotonicity_violations = 0;
    std::size_t pair_count = 0;
    std::size_t path_count = 0;
    double dt = 0.0;
    // censored fraction above 1% flags the whole report
    bool horizon_fail = false;
    // filled by verify_embedding
    std::vector<double> ks;

    double censored_fraction() const {
        return path_count == 0 ? 0.0
                               : static_cast<double>(censored_paths) /
                                     static_cast<double>(path_count);
    }
};

// Simulates cfg.paths Brownian paths and stops each at the barrier of every
// requested time in increasing order. Every entry of times must match a
// family time exactly. Throws NotCentered, ConfigError, PreconditionFailed.
EmbeddingReport simulate_embedding(const TimeFamily& fam, const std::vector<double>& times,
                                   const PathConfig& cfg);

// Two-sided KS distance between the stopped values and the target marginal,
// per time, atoms handled through the closed-interval survival. Censored
// paths are excluded. The distances are also written into report.ks.
std::vector<double> verify_embedding(EmbeddingReport& report, const TimeFamily& fam,
                                     const std::vector<double>& times);

struct MartingaleBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double mean_residual = 0.0;
    double stderr_residual = 0.0;
    bool pass = false;
};

struct MartingaleTable {
    std::vector<MartingaleBin> bins;
    bool pass = false;
};

// Bins paths by their value at t1 (equal counts) and tests that the mean
// increment to t2 vanishes per bin within 3 standard errors plus 1e-3.
// Throws InsufficientPaths when a bin would hold fewer than 100 paths.
MartingaleTable verify_martingale(const EmbeddingReport& report, double t1, double t2,
                                  std::size_t bins);

// Report CSV: path,time,T,M,censored. Summary CSV needs verify_embedding run
// first and holds one row per time: time,ks,censored_frac,monotonicity_violations.
void write_embedding_csv(const std::string& path, const EmbeddingReport& report);
void write_embedding_summary_csv(const std::string& path, const EmbeddingReport& report);

}  // namespace peacock
