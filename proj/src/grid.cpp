#include "mcadiff/grid.hpp"

#include "mcadiff/counter_rng.hpp"
#include "mcadiff/errors.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

namespace mcadiff::mca {

RuleParams RuleParams::type1(double p) {
    RuleParams r{Variant::Type1, p, 0.0};
    r.validate();
    return r;
}

RuleParams RuleParams::type2(double ps) {
    RuleParams r{Variant::Type2, 0.5, ps};
    r.validate();
    return r;
}

void RuleParams::validate() const {
    if (variant == Variant::Type1) {
        if (!(p > 0.0 && p <= 0.5)) throw InvalidArgument("type1 rule: p must lie in (0, 1/2]");
    } else {
        if (!(ps >= 0.0 && ps <= 1.0)) throw InvalidArgument("type2 rule: ps must lie in [0, 1]");
    }
}

Block rotate_block(Block b, Rotation rotation) {
    switch (rotation) {
    case Rotation::CW:
        return Block{.nw = b.sw, .ne = b.nw, .sw = b.se, .se = b.ne};
    case Rotation::CCW:
        return Block{.nw = b.ne, .ne = b.se, .sw = b.nw, .se = b.sw};
    case Rotation::None:
        break;
    }
    return b;
}

bool is_skipped(std::uint64_t seed, std::uint32_t layer, std::uint64_t t, double ps) {
    if (ps <= 0.0) return false;
    if (t == 0) return false;
    const std::uint64_t check = (t & 1U) ? t : t - 1;  // the odd step that owns this pair
    return rng::to_unit(rng::counter_hash(seed, rng::Stream::Skip, layer, check, 0)) < ps;
}

Rotation block_rotation(std::uint64_t seed, std::uint32_t layer, std::uint64_t t, std::uint64_t block_index,
                        const RuleParams& rule) {
    if (rule.variant == Variant::Type2 && is_skipped(seed, layer, t, rule.ps)) return Rotation::None;
    const double p = rule.rotation_probability();
    const double u = rng::to_unit(rng::counter_hash(seed, rng::Stream::BlockRotation, layer, t, block_index));
    if (u < p) return Rotation::CW;
    if (u < 2.0 * p) return Rotation::CCW;
    return Rotation::None;
}

BlockAddress locate(int col, int row, std::uint64_t t, int width, int height) {
    BlockAddress a;
    a.offset = partition_offset(t);
    const int cc = ((col - a.offset) % width + width) % width;
    const int rr = ((row - a.offset) % height + height) % height;
    a.block_col = cc / 2;
    a.block_row = rr / 2;
    a.local_col = cc % 2;
    a.local_row = rr % 2;
    return a;
}

Grid::Grid(int width, int height, int layers, std::uint64_t seed, double dx, double dt)
    : width_(width), height_(height), seed_(seed), dx_(dx), dt_(dt) {
    if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0) {
        throw InvalidArgument("grid dimensions must be positive and even");
    }
    if (layers <= 0) throw InvalidArgument("grid needs at least one layer");
    if (!(dx > 0.0) || !(dt > 0.0)) throw InvalidArgument("dx and dt must be positive");
    words_per_row_ = (static_cast<std::size_t>(width) + 63) / 64;
    planes_.assign(static_cast<std::size_t>(layers),
                   std::vector<std::uint64_t>(words_per_row_ * static_cast<std::size_t>(height), 0));
}

bool Grid::get(int layer, int col, int row) const {
    const auto words = row_words(layer, row);
    return (words[static_cast<std::size_t>(col) / 64] >> (col % 64)) & 1U;
}

void Grid::set(int layer, int col, int row, bool value) {
    if (col < 0 || col >= width_ || row < 0 || row >= height_) throw InvalidArgument("cell outside the grid");
    auto words = row_words(layer, row);
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    if (value) {
        words[static_cast<std::size_t>(col) / 64] |= bit;
    } else {
        words[static_cast<std::size_t>(col) / 64] &= ~bit;
    }
}

std::size_t Grid::count(int layer) const {
    std::size_t n = 0;
    for (std::uint64_t w : planes_.at(static_cast<std::size_t>(layer))) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::span<std::uint64_t> Grid::row_words(int layer, int row) {
    auto& plane = planes_.at(static_cast<std::size_t>(layer));
    return {plane.data() + static_cast<std::size_t>(row) * words_per_row_, words_per_row_};
}

std::span<const std::uint64_t> Grid::row_words(int layer, int row) const {
    const auto& plane = planes_.at(static_cast<std::size_t>(layer));
    return {plane.data() + static_cast<std::size_t>(row) * words_per_row_, words_per_row_};
}

Grid new_grid(const GridConfig& config) {
    if (config.layers.empty()) throw InvalidArgument("grid config needs at least one layer");
    Grid grid(config.width, config.height, static_cast<int>(config.layers.size()), config.seed, config.dx, config.dt);
    for (std::size_t layer = 0; layer < config.layers.size(); ++layer) {
        const int l = static_cast<int>(layer);
        if (const auto* density = std::get_if<double>(&config.layers[layer])) {
            if (!(*density >= 0.0 && *density <= 1.0)) throw InvalidArgument("layer density must lie in [0, 1]");
            for (int row = 0; row < config.height; ++row) {
                for (int col = 0; col < config.width; ++col) {
                    const double u = rng::to_unit(rng::counter_hash(config.seed, rng::Stream::Fill, layer,
                                                                    static_cast<std::uint64_t>(row),
                                                                    static_cast<std::uint64_t>(col)));
                    if (u < *density) grid.set(l, col, row, true);
                }
            }
        } else {
            const auto& bitmap = std::get<Bitmap>(config.layers[layer]);
            if (bitmap.cells.size() != static_cast<std::size_t>(config.width) * static_cast<std::size_t>(config.height)) {
                throw InvalidArgument("layer bitmap size does not match the grid");
            }
            for (int row = 0; row < config.height; ++row) {
                for (int col = 0; col < config.width; ++col) {
                    if (bitmap.cells[static_cast<std::size_t>(row) * static_cast<std::size_t>(config.width) +
                                     static_cast<std::size_t>(col)]) {
                        grid.set(l, col, row, true);
                    }
                }
            }
        }
    }
    return grid;
}

namespace {

constexpr std::uint64_t kEvenBits = 0x5555555555555555ULL;
constexpr std::uint64_t kOddBits = 0xAAAAAAAAAAAAAAAAULL;

// aligned[i] = row[(i + 1) mod width]
void rotate_down_one(std::span<const std::uint64_t> row, std::span<std::uint64_t> out, int width) {
    const std::size_t n = row.size();
    for (std::size_t w = 0; w < n; ++w) {
        const std::uint64_t carry = (w + 1 < n) ? (row[w + 1] << 63) : 0;
        out[w] = (row[w] >> 1) | carry;
    }
    const int last = width - 1;
    out[static_cast<std::size_t>(last) / 64] |= (row[0] & 1U) << (last % 64);
}

// row[(i + 1) mod width] = aligned[i]
void rotate_up_one(std::span<const std::uint64_t> aligned, std::span<std::uint64_t> out, int width) {
    const std::size_t n = aligned.size();
    const int last = width - 1;
    const std::uint64_t wrapped = (aligned[static_cast<std::size_t>(last) / 64] >> (last % 64)) & 1U;
    for (std::size_t w = 0; w < n; ++w) {
        const std::uint64_t carry = w > 0 ? (aligned[w - 1] >> 63) : 0;
        out[w] = (aligned[w] << 1) | carry;
    }
    if (width % 64 != 0) out[n - 1] &= (std::uint64_t{1} << (width % 64)) - 1;
    out[0] |= wrapped;
}

void step_block_rows(Grid& grid, int layer, const RuleParams& rule, int first_block_row, int last_block_row) {
    const std::uint64_t t = grid.time();
    const int offset = partition_offset(t);
    const int width = grid.width();
    const int height = grid.height();
    const std::size_t nw = grid.words_per_row();
    const std::uint64_t blocks_per_row = static_cast<std::uint64_t>(width / 2);

    std::vector<std::uint64_t> top(nw), bottom(nw), cw(nw), ccw(nw), new_top(nw), new_bottom(nw);
    for (int br = first_block_row; br < last_block_row; ++br) {
        const int r0 = (offset + 2 * br) % height;
        const int r1 = (offset + 2 * br + 1) % height;
        auto row0 = grid.row_words(layer, r0);
        auto row1 = grid.row_words(layer, r1);
        if (offset == 0) {
            std::copy(row0.begin(), row0.end(), top.begin());
            std::copy(row1.begin(), row1.end(), bottom.begin());
        } else {
            rotate_down_one(row0, top, width);
            rotate_down_one(row1, bottom, width);
        }

        std::fill(cw.begin(), cw.end(), 0);
        std::fill(ccw.begin(), ccw.end(), 0);
        // Empty blocks are invariant under rotation, so only occupied blocks draw.
        bool any = false;
        for (std::size_t w = 0; w < nw; ++w) {
            const std::uint64_t cells = top[w] | bottom[w];
            std::uint64_t occupied = (cells | (cells >> 1)) & kEvenBits;
            any = any || occupied != 0;
            while (occupied != 0) {
                const int bit = std::countr_zero(occupied);
                occupied &= occupied - 1;
                const std::uint64_t bc = (64 * w + static_cast<std::uint64_t>(bit)) / 2;
                const Rotation rot = block_rotation(grid.seed(), static_cast<std::uint32_t>(layer), t,
                                                    static_cast<std::uint64_t>(br) * blocks_per_row + bc, rule);
                if (rot == Rotation::None) continue;
                (rot == Rotation::CW ? cw : ccw)[w] |= std::uint64_t{3} << bit;
            }
        }
        if (!any) continue;

        for (std::size_t w = 0; w < nw; ++w) {
            const std::uint64_t tp = top[w];
            const std::uint64_t bt = bottom[w];
            // West cells sit on even bits, east cells on odd bits.
            const std::uint64_t cw_top = (bt & kEvenBits) | ((tp & kEvenBits) << 1);
            const std::uint64_t cw_bottom = (tp & kOddBits) | ((bt & kOddBits) >> 1);
            const std::uint64_t ccw_top = ((tp & kOddBits) >> 1) | (bt & kOddBits);
            const std::uint64_t ccw_bottom = (tp & kEvenBits) | ((bt & kEvenBits) << 1);
            const std::uint64_t keep = ~(cw[w] | ccw[w]);
            new_top[w] = (tp & keep) | (cw_top & cw[w]) | (ccw_top & ccw[w]);
            new_bottom[w] = (bt & keep) | (cw_bottom & cw[w]) | (ccw_bottom & ccw[w]);
        }

        if (offset == 0) {
            std::copy(new_top.begin(), new_top.end(), row0.begin());
            std::copy(new_bottom.begin(), new_bottom.end(), row1.begin());
        } else {
            rotate_up_one(new_top, row0, width);
            rotate_up_one(new_bottom, row1, width);
        }
    }
}

}  // namespace

void step(Grid& grid, std::span<const RuleParams> rules, unsigned threads) {
    if (rules.size() != static_cast<std::size_t>(grid.layers())) {
        throw InvalidArgument("step: need one rule per layer");
    }
    for (const auto& rule : rules) rule.validate();
    const int block_rows = grid.height() / 2;
    const unsigned workers = std::clamp<unsigned>(threads, 1U, static_cast<unsigned>(block_rows));

    for (int layer = 0; layer < grid.layers(); ++layer) {
        const RuleParams& rule = rules[static_cast<std::size_t>(layer)];
        if (rule.variant == Variant::Type2 &&
            is_skipped(grid.seed(), static_cast<std::uint32_t>(layer), grid.time(), rule.ps)) {
            continue;
        }
        if (workers == 1) {
            step_block_rows(grid, layer, rule, 0, block_rows);
            continue;
        }
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const int first = static_cast<int>(static_cast<long>(block_rows) * w / workers);
            const int last = static_cast<int>(static_cast<long>(block_rows) * (w + 1) / workers);
            pool.emplace_back([&grid, layer, &rule, first, last] { step_block_rows(grid, layer, rule, first, last); });
        }
    }
    grid.advance_time();
}

void step(Grid& grid, const RuleParams& rule, unsigned threads) {
    const std::vector<RuleParams> rules(static_cast<std::size_t>(grid.layers()), rule);
    step(grid, rules, threads);
}

void write_grid(std::ostream& out, const Grid& grid) {
    out << "MCA " << grid.width() << ' ' << grid.height() << ' ' << grid.layers() << '\n';
    for (int layer = 0; layer < grid.layers(); ++layer) {
        if (layer > 0) out << '\n';
        for (int row = 0; row < grid.height(); ++row) {
            std::string line(static_cast<std::size_t>(grid.width()), '0');
            for (int col = 0; col < grid.width(); ++col) {
                if (grid.get(layer, col, row)) line[static_cast<std::size_t>(col)] = '1';
            }
            out << line << '\n';
        }
    }
}

Grid read_grid(std::istream& in, std::uint64_t seed, double dx, double dt) {
    std::string header;
    if (!std::getline(in, header)) throw InvalidArgument("grid text: missing header");
    std::istringstream hs(header);
    std::string magic;
    int width = 0;
    int height = 0;
    int layers = 0;
    if (!(hs >> magic >> width >> height >> layers) || magic != "MCA") {
        throw InvalidArgument("grid text: header must be 'MCA <width> <height> <layers>'");
    }
    Grid grid(width, height, layers, seed, dx, dt);
    std::string line;
    for (int layer = 0; layer < layers; ++layer) {
        for (int row = 0; row < height;) {
            if (!std::getline(in, line)) throw InvalidArgument("grid text: truncated raster");
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) {
                if (row == 0) continue;
                throw InvalidArgument("grid text: blank line inside a raster");
            }
            if (line.size() != static_cast<std::size_t>(width)) throw InvalidArgument("grid text: wrong row length");
            for (int col = 0; col < width; ++col) {
                const char c = line[static_cast<std::size_t>(col)];
                if (c != '0' && c != '1') throw InvalidArgument("grid text: cells must be '0' or '1'");
                if (c == '1') grid.set(layer, col, row, true);
            }
            ++row;
        }
    }
    return grid;
}

}  // namespace mcadiff::mca
