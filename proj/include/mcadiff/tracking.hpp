#pragma once

// Single-particle tracking in the Margolus automaton and ensemble statistics of the
// x-projection.

#include "mcadiff/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mcadiff::mca {

/// Direction in which a particle in column `col` can move along x at step t: +1 when the
/// particle sits in the west column of its active block, -1 in the east column.
constexpr int direction_at(int col, std::uint64_t t) {
    return ((static_cast<std::uint64_t>(col) ^ t) & 1U) == 0 ? 1 : -1;
}

struct TracePoint {
    std::uint64_t t = 0;
    int col = 0;
    int row = 0;
    long x = 0;  // unwrapped column displacement from the start
    int d = 1;
};

struct ParticleTrace {
    std::vector<TracePoint> points;
};

enum class Engine {
    /// Evaluates only the block holding the particle. All other blocks are empty, so the
    /// outcome equals stepping the whole grid.
    OccupiedBlock,
    /// Steps the whole bit-packed grid.
    FullGrid,
};

/// Follows the only particle of `layer` for `steps` steps, advancing the grid. FullGrid
/// steps every layer with `rule`; OccupiedBlock needs a single-layer grid. Throws
/// InvalidArgument unless the tracked layer holds exactly one particle.
ParticleTrace track_particle(Grid& grid, const RuleParams& rule, int steps, int layer = 0,
                             Engine engine = Engine::OccupiedBlock);

/// CSV "t,col,row,x,d".
void write_trace_csv(std::ostream& out, const ParticleTrace& trace);

struct EnsembleOptions {
    /// Torus size; 0 picks the smallest even size >= 6 sqrt(2 D_c t) (at least 4).
    int width = 0;
    int height = 0;
    unsigned threads = 1;
    int batches = 100;
    Engine engine = Engine::OccupiedBlock;
};

/// Smallest even torus side that keeps wrap-around below sampling noise.
int auto_torus_size(const RuleParams& rule, int steps);

/// Integer moment sums of the x-projection, kept per batch of trials so that results are
/// exact and independent of how trials are distributed across threads.
struct DispersionSeries {
    int steps = 0;
    long trials = 0;
    int batches = 0;
    std::uint64_t seed = 0;
    std::vector<long> batch_trials;              // [batch]
    std::vector<std::int64_t> sum1, sum2, sum3, sum4;  // [batch * (steps + 1) + t]
    std::vector<std::int64_t> endpoint_counts;   // x = -steps .. steps at the final step

    std::size_t index(int batch, int t) const {
        return static_cast<std::size_t>(batch) * static_cast<std::size_t>(steps + 1) + static_cast<std::size_t>(t);
    }
    double mean(int t) const;
    /// Unbiased sample variance of x at step t.
    double dispersion(int t) const;
    /// Large-sample standard error of dispersion(t).
    double standard_error(int t) const;
};

/// Runs `trials` independent single-particle grids. Each trial places its particle
/// uniformly at random; the column parity then fixes the initial direction, which is
/// +1 or -1 with probability 1/2 each.
DispersionSeries ensemble_dispersion(const RuleParams& rule, int steps, long trials, std::uint64_t seed,
                                     const EnsembleOptions& options = {});

/// CSV "t,dispersion,stderr".
void write_series_csv(std::ostream& out, const DispersionSeries& series);

struct FitWindow {
    int from = 0;
    int to = 0;
};

struct DiffusionEstimate {
    double k = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    FitWindow window;
    double dx = 1.0;
    double dt = 1.0;
    std::uint64_t seed = 0;
};

/// k = mean over t in the window of dispersion(t) / (2t), times dx^2/dt, with a 95%
/// percentile bootstrap interval from resampling trial batches.
DiffusionEstimate estimate_diffusion(const DispersionSeries& series, FitWindow window, double dx = 1.0,
                                     double dt = 1.0, int resamples = 1000);

}  // namespace mcadiff::mca
