#include "mcadiff/tracking.hpp"

#include "mcadiff/analytic.hpp"
#include "mcadiff/counter_rng.hpp"
#include "mcadiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

namespace mcadiff::mca {

namespace {

Block single(int local_col, int local_row) {
    Block b;
    if (local_row == 0) {
        (local_col == 0 ? b.nw : b.ne) = true;
    } else {
        (local_col == 0 ? b.sw : b.se) = true;
    }
    return b;
}

void occupied(const Block& b, int& local_col, int& local_row) {
    if (b.nw) {
        local_col = 0;
        local_row = 0;
    } else if (b.ne) {
        local_col = 1;
        local_row = 0;
    } else if (b.sw) {
        local_col = 0;
        local_row = 1;
    } else {
        local_col = 1;
        local_row = 1;
    }
}

struct Cell {
    int col;
    int row;
};

// Moves a lone particle through one step of the block containing it. Returns the new cell
// and the x displacement (-1, 0 or +1).
inline Cell advance_lone(int col, int row, std::uint64_t t, int width, int height, std::uint64_t seed,
                         std::uint32_t layer, const RuleParams& rule, int& dx) {
    const BlockAddress a = locate(col, row, t, width, height);
    const std::uint64_t index =
        static_cast<std::uint64_t>(a.block_row) * static_cast<std::uint64_t>(width / 2) + static_cast<std::uint64_t>(a.block_col);
    const Rotation rot = block_rotation(seed, layer, t, index, rule);
    if (rot == Rotation::None) {
        dx = 0;
        return {col, row};
    }
    int lc = 0;
    int lr = 0;
    occupied(rotate_block(single(a.local_col, a.local_row), rot), lc, lr);
    dx = lc - a.local_col;
    return {(a.offset + 2 * a.block_col + lc) % width, (a.offset + 2 * a.block_row + lr) % height};
}

Cell find_single(const Grid& grid, int layer) {
    for (int row = 0; row < grid.height(); ++row) {
        for (int col = 0; col < grid.width(); ++col) {
            if (grid.get(layer, col, row)) return {col, row};
        }
    }
    throw InvalidArgument("track_particle: layer is empty");
}

}  // namespace

ParticleTrace track_particle(Grid& grid, const RuleParams& rule, int steps, int layer, Engine engine) {
    rule.validate();
    if (steps < 0) throw InvalidArgument("track_particle: steps must be non-negative");
    if (layer < 0 || layer >= grid.layers()) throw InvalidArgument("track_particle: no such layer");
    if (grid.count(layer) != 1) throw InvalidArgument("track_particle: the tracked layer must hold exactly one particle");
    if (engine == Engine::OccupiedBlock && grid.layers() != 1) {
        throw InvalidArgument("track_particle: the occupied-block engine needs a single-layer grid");
    }

    ParticleTrace trace;
    trace.points.reserve(static_cast<std::size_t>(steps) + 1);
    Cell cell = find_single(grid, layer);
    long x = 0;
    trace.points.push_back({grid.time(), cell.col, cell.row, x, direction_at(cell.col, grid.time())});

    for (int i = 0; i < steps; ++i) {
        const std::uint64_t t = grid.time();
        if (engine == Engine::OccupiedBlock) {
            int dx = 0;
            const Cell next = advance_lone(cell.col, cell.row, t, grid.width(), grid.height(), grid.seed(),
                                           static_cast<std::uint32_t>(layer), rule, dx);
            grid.set(layer, cell.col, cell.row, false);
            grid.set(layer, next.col, next.row, true);
            grid.advance_time();
            cell = next;
            x += dx;
        } else {
            const BlockAddress a = locate(cell.col, cell.row, t, grid.width(), grid.height());
            step(grid, rule);
            Cell next{-1, -1};
            for (int lr = 0; lr < 2 && next.col < 0; ++lr) {
                for (int lc = 0; lc < 2; ++lc) {
                    const int c = (a.offset + 2 * a.block_col + lc) % grid.width();
                    const int r = (a.offset + 2 * a.block_row + lr) % grid.height();
                    if (grid.get(layer, c, r)) {
                        next = {c, r};
                        x += lc - a.local_col;
                        break;
                    }
                }
            }
            if (next.col < 0) throw InvalidArgument("track_particle: particle left its block");
            cell = next;
        }
        trace.points.push_back({grid.time(), cell.col, cell.row, x, direction_at(cell.col, grid.time())});
    }
    return trace;
}

void write_trace_csv(std::ostream& out, const ParticleTrace& trace) {
    out << "t,col,row,x,d\n";
    for (const auto& p : trace.points) out << p.t << ',' << p.col << ',' << p.row << ',' << p.x << ',' << p.d << '\n';
}

int auto_torus_size(const RuleParams& rule, int steps) {
    const double dc = rule.variant == Variant::Type1 ? analytic::diffusion_coefficient(rule.p)
                                                     : analytic::type2_diffusion_coefficient(rule.ps);
    int side = static_cast<int>(std::ceil(6.0 * std::sqrt(2.0 * dc * std::max(steps, 0))));
    if (side % 2 != 0) ++side;
    return std::max(side, 4);
}

double DispersionSeries::mean(int t) const {
    long double s1 = 0;
    for (int b = 0; b < batches; ++b) s1 += static_cast<long double>(sum1[index(b, t)]);
    return static_cast<double>(s1 / static_cast<long double>(trials));
}

double DispersionSeries::dispersion(int t) const {
    long double s1 = 0;
    long double s2 = 0;
    for (int b = 0; b < batches; ++b) {
        s1 += static_cast<long double>(sum1[index(b, t)]);
        s2 += static_cast<long double>(sum2[index(b, t)]);
    }
    const long double n = static_cast<long double>(trials);
    return static_cast<double>((s2 - s1 * s1 / n) / (n - 1));
}

double DispersionSeries::standard_error(int t) const {
    long double s[5] = {0, 0, 0, 0, 0};
    for (int b = 0; b < batches; ++b) {
        s[1] += static_cast<long double>(sum1[index(b, t)]);
        s[2] += static_cast<long double>(sum2[index(b, t)]);
        s[3] += static_cast<long double>(sum3[index(b, t)]);
        s[4] += static_cast<long double>(sum4[index(b, t)]);
    }
    const long double n = static_cast<long double>(trials);
    const long double m = s[1] / n;
    const long double m4 = s[4] / n - 4 * m * s[3] / n + 6 * m * m * s[2] / n - 3 * m * m * m * m;
    const long double var = (s[2] - s[1] * s[1] / n) / (n - 1);
    const long double se2 = (m4 - var * var * (n - 3) / (n - 1)) / n;
    return se2 > 0 ? static_cast<double>(std::sqrt(se2)) : 0.0;
}

DispersionSeries ensemble_dispersion(const RuleParams& rule, int steps, long trials, std::uint64_t seed,
                                     const EnsembleOptions& options) {
    rule.validate();
    if (steps < 1) throw InvalidArgument("ensemble_dispersion: steps must be positive");
    if (trials < 100) throw InvalidArgument("ensemble_dispersion: at least 100 trials are required");
    if (options.batches < 2 || options.batches > trials) {
        throw InvalidArgument("ensemble_dispersion: batches must lie in [2, trials]");
    }
    const int width = options.width > 0 ? options.width : auto_torus_size(rule, steps);
    const int height = options.height > 0 ? options.height : auto_torus_size(rule, steps);
    if (width % 2 != 0 || height % 2 != 0) throw InvalidArgument("ensemble_dispersion: torus sides must be even");

    DispersionSeries series;
    series.steps = steps;
    series.trials = trials;
    series.batches = options.batches;
    series.seed = seed;
    series.batch_trials.resize(static_cast<std::size_t>(options.batches));
    const long max_batch = (trials + options.batches - 1) / options.batches;
    const long double bound = static_cast<long double>(max_batch) * std::pow(static_cast<long double>(steps), 4);
    if (bound >= static_cast<long double>(std::numeric_limits<std::int64_t>::max())) {
        throw InvalidArgument("ensemble_dispersion: batch too large for exact moment sums; raise --batches");
    }

    const std::size_t cells = static_cast<std::size_t>(options.batches) * static_cast<std::size_t>(steps + 1);
    series.sum1.assign(cells, 0);
    series.sum2.assign(cells, 0);
    series.sum3.assign(cells, 0);
    series.sum4.assign(cells, 0);

    const unsigned workers = std::clamp<unsigned>(options.threads, 1U, static_cast<unsigned>(options.batches));
    std::vector<std::vector<std::int64_t>> endpoints(workers, std::vector<std::int64_t>(2 * static_cast<std::size_t>(steps) + 1, 0));

    auto run_batch = [&](int batch, std::vector<std::int64_t>& ends) {
        const long first = trials * batch / options.batches;
        const long last = trials * (batch + 1) / options.batches;
        series.batch_trials[static_cast<std::size_t>(batch)] = last - first;
        std::int64_t* s1 = &series.sum1[series.index(batch, 0)];
        std::int64_t* s2 = &series.sum2[series.index(batch, 0)];
        std::int64_t* s3 = &series.sum3[series.index(batch, 0)];
        std::int64_t* s4 = &series.sum4[series.index(batch, 0)];
        std::vector<long> xs;
        for (long trial = first; trial < last; ++trial) {
            const std::uint64_t trial_seed =
                rng::counter_hash(seed, rng::Stream::Trial, static_cast<std::uint64_t>(trial), 0, 0);
            const std::uint64_t h = rng::counter_hash(trial_seed, rng::Stream::Placement, 0, 0, 0);
            const int col0 = static_cast<int>((h & 0xffffffffULL) % static_cast<std::uint64_t>(width));
            const int row0 = static_cast<int>((h >> 32) % static_cast<std::uint64_t>(height));

            xs.assign(static_cast<std::size_t>(steps) + 1, 0);
            if (options.engine == Engine::OccupiedBlock) {
                int col = col0;
                int row = row0;
                long x = 0;
                for (int t = 0; t < steps; ++t) {
                    int dx = 0;
                    const Cell next = advance_lone(col, row, static_cast<std::uint64_t>(t), width, height, trial_seed,
                                                   0, rule, dx);
                    col = next.col;
                    row = next.row;
                    x += dx;
                    xs[static_cast<std::size_t>(t) + 1] = x;
                }
            } else {
                Grid grid(width, height, 1, trial_seed);
                grid.set(0, col0, row0, true);
                const ParticleTrace trace = track_particle(grid, rule, steps, 0, Engine::FullGrid);
                for (int t = 0; t <= steps; ++t) xs[static_cast<std::size_t>(t)] = trace.points[static_cast<std::size_t>(t)].x;
            }
            for (int t = 0; t <= steps; ++t) {
                const std::int64_t x = xs[static_cast<std::size_t>(t)];
                const std::int64_t x2 = x * x;
                s1[t] += x;
                s2[t] += x2;
                s3[t] += x2 * x;
                s4[t] += x2 * x2;
            }
            ++ends[static_cast<std::size_t>(xs.back() + steps)];
        }
    };

    if (workers == 1) {
        for (int b = 0; b < options.batches; ++b) run_batch(b, endpoints[0]);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int b = static_cast<int>(w); b < options.batches; b += static_cast<int>(workers)) run_batch(b, endpoints[w]);
            });
        }
    }

    series.endpoint_counts.assign(2 * static_cast<std::size_t>(steps) + 1, 0);
    for (const auto& ends : endpoints) {
        for (std::size_t i = 0; i < ends.size(); ++i) series.endpoint_counts[i] += ends[i];
    }
    return series;
}

void write_series_csv(std::ostream& out, const DispersionSeries& series) {
    out << "t,dispersion,stderr\n";
    const auto old_precision = out.precision(17);
    for (int t = 0; t <= series.steps; ++t) {
        out << t << ',' << series.dispersion(t) << ',' << series.standard_error(t) << '\n';
    }
    out.precision(old_precision);
}

DiffusionEstimate estimate_diffusion(const DispersionSeries& series, FitWindow window, double dx, double dt,
                                     int resamples) {
    if (window.from < 1 || window.to < window.from || window.to > series.steps) {
        throw InvalidArgument("estimate_diffusion: fit window must satisfy 1 <= from <= to <= steps");
    }
    if (!(dx > 0.0) || !(dt > 0.0)) throw InvalidArgument("estimate_diffusion: dx and dt must be positive");
    if (resamples < 1) throw InvalidArgument("estimate_diffusion: need at least one bootstrap resample");

    const double scale = dx * dx / dt;
    const int width = window.to - window.from + 1;

    // k from a multiset of batches given as multiplicities.
    auto estimate = [&](const std::vector<int>& weight) {
        long double n = 0;
        for (int b = 0; b < series.batches; ++b) n += static_cast<long double>(weight[static_cast<std::size_t>(b)]) * series.batch_trials[static_cast<std::size_t>(b)];
        long double acc = 0;
        for (int t = window.from; t <= window.to; ++t) {
            long double s1 = 0;
            long double s2 = 0;
            for (int b = 0; b < series.batches; ++b) {
                const int w = weight[static_cast<std::size_t>(b)];
                if (w == 0) continue;
                s1 += static_cast<long double>(w) * static_cast<long double>(series.sum1[series.index(b, t)]);
                s2 += static_cast<long double>(w) * static_cast<long double>(series.sum2[series.index(b, t)]);
            }
            const long double var = (s2 - s1 * s1 / n) / (n - 1);
            acc += var / (2.0L * t);
        }
        return static_cast<double>(acc / width) * scale;
    };

    DiffusionEstimate est;
    est.window = window;
    est.dx = dx;
    est.dt = dt;
    est.seed = series.seed;
    est.k = estimate(std::vector<int>(static_cast<std::size_t>(series.batches), 1));

    std::mt19937_64 gen(rng::counter_hash(series.seed, rng::Stream::Bootstrap, 0, 0, 0));
    std::uniform_int_distribution<int> pick(0, series.batches - 1);
    std::vector<double> ks;
    ks.reserve(static_cast<std::size_t>(resamples));
    std::vector<int> weight(static_cast<std::size_t>(series.batches));
    for (int r = 0; r < resamples; ++r) {
        std::fill(weight.begin(), weight.end(), 0);
        for (int i = 0; i < series.batches; ++i) ++weight[static_cast<std::size_t>(pick(gen))];
        ks.push_back(estimate(weight));
    }
    std::sort(ks.begin(), ks.end());
    const auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(ks.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, ks.size() - 1);
        return ks[lo] + (pos - static_cast<double>(lo)) * (ks[hi] - ks[lo]);
    };
    est.ci_low = quantile(0.025);
    est.ci_high = quantile(0.975);
    return est;
}

}  // namespace mcadiff::mca
