#pragma once

#include <cstdint>
#include <random>

#include "levyme/levy_model.hpp"
#include "levyme/me_dist.hpp"

namespace levyme {

/// Simulation protocol: grid step, path count, seed, horizon cap. Results are
/// bit-identical for a fixed (seed, paths, h) regardless of evaluation order;
/// every path owns a private stream keyed on (seed, path index).
struct SimConfig {
    double h = 0.001;
    std::int64_t paths = 3000;
    std::uint64_t seed = 1;
    double horizon_cap = 50.0;
};

/// Barriers and recordings requested of the walker.
struct BarrierSpec {
    std::vector<double> up_levels;       // first-passage times above each level
    std::vector<double> down_levels;     // first-passage times below each -level (levels >= 0)
    bool record_reflected = false;       // Skorokhod reflection at 0
    double reflect_start = 0.0;          // initial level of the reflected process
    std::vector<double> reflect_levels;  // eta_a detection levels for the reflected process
};

constexpr double kNever = -1.0;

struct PathSummary {
    double horizon = 0.0;  // sampled T (possibly capped)
    double terminal = 0.0; // X_T
    double sup = 0.0;
    double inf = 0.0;
    bool capped = false;
    std::vector<double> up_hit;   // hit times per up level, kNever when missed
    std::vector<double> down_hit; // hit times per down level
    std::vector<double> reflected_hit;       // eta_a per reflect level
    std::vector<double> reflected_regulator; // R at eta_a per reflect level
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;
};

/// Stream seed for path `index` under master `seed` (splitmix64 of the pair).
std::uint64_t path_stream_seed(std::uint64_t seed, std::int64_t index);

/// One draw of the normalized totally-skewed stable increment over dt:
/// dt^{1/alpha} times a Chambers-Mallows-Stuck variate scaled so that
/// log E e^{theta X_1} = theta^alpha. Consumes two uniforms.
double stable_increment(double alpha, double dt, std::mt19937_64& rng);

/// Simulates `config.paths` paths of the model killed at an independent draw
/// of `horizon`, recording the requested functionals. Grid walk for the
/// Brownian and stable families; the compound-Poisson family without Brownian
/// part is simulated exactly at event times (no grid bias).
std::vector<PathSummary> simulate_paths(const LevyModel& model, const MERep& horizon,
                                        const SimConfig& config, const BarrierSpec& barriers);

/// Mean and standard error of a per-path functional.
template <typename F>
Estimate estimate(const std::vector<PathSummary>& summaries, F&& fn) {
    Estimate e;
    e.n = static_cast<std::int64_t>(summaries.size());
    if (e.n == 0) return e;
    double sum = 0.0, sumsq = 0.0;
    for (const auto& s : summaries) {
        const double v = fn(s);
        sum += v;
        sumsq += v * v;
    }
    e.value = sum / e.n;
    const double var = std::max(0.0, sumsq / e.n - e.value * e.value);
    e.std_error = std::sqrt(var / e.n);
    return e;
}

/// Fraction of paths whose horizon draw exceeded the cap.
double capped_mass(const std::vector<PathSummary>& summaries);

/// Empirical generator of the first-passage phase chain of a PH horizon.
struct PhaseGenerator {
    RealMatrix generator; // log of the level-step transition matrix / dx
    RealMatrix std_error; // first-order binomial SEs propagated through the log
    std::vector<std::int64_t> transitions; // observed transitions out of each phase
};

/// Tracks the PH phase at first-passage levels k*dx and estimates the chain
/// generator, to be compared with -Phi(-T). Throws InsufficientPassagesError
/// when any phase row has fewer than `min_transitions` observations.
PhaseGenerator phase_tracked_simulate(const LevyModel& model, const MERep& ph_horizon,
                                      const SimConfig& config, double dx, double max_level,
                                      std::int64_t min_transitions = 50);

} // namespace levyme
