#pragma once

// Margolus-neighbourhood cellular automaton on a bit-packed torus.
//
// Cells hold one bit per layer. At even steps the grid is tiled by 2x2 blocks anchored at
// even (col, row); at odd steps by blocks anchored at odd (col, row), wrapping around the
// torus. Each block of the active tiling independently rotates clockwise, counterclockwise
// or stays. Rows increase downward; inside a block NW = (c, r), NE = (c+1, r),
// SW = (c, r+1), SE = (c+1, r+1), and clockwise is NW -> NE -> SE -> SW -> NW.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace mcadiff::mca {

enum class Variant { Type1, Type2 };

/// Type1: each block rotates CW with probability p, CCW with probability p.
/// Type2: p is fixed at 1/2 and, checked at every odd step, both that step and the next
/// are skipped for the whole layer with probability ps.
struct RuleParams {
    Variant variant = Variant::Type1;
    double p = 0.5;
    double ps = 0.0;

    static RuleParams type1(double p);
    static RuleParams type2(double ps);

    /// Throws InvalidArgument when the parameters are out of range.
    void validate() const;
    double rotation_probability() const { return variant == Variant::Type1 ? p : 0.5; }
};

enum class Rotation : std::uint8_t { None, CW, CCW };

/// Occupancy of one 2x2 block.
struct Block {
    bool nw = false;
    bool ne = false;
    bool sw = false;
    bool se = false;

    friend bool operator==(const Block&, const Block&) = default;
};

Block rotate_block(Block block, Rotation rotation);

/// The rotation drawn for a block (identified by its index within the active tiling) at
/// step t, including the Type2 skip.
Rotation block_rotation(std::uint64_t seed, std::uint32_t layer, std::uint64_t t, std::uint64_t block_index,
                        const RuleParams& rule);

/// Whether a Type2 layer is frozen at step t.
bool is_skipped(std::uint64_t seed, std::uint32_t layer, std::uint64_t t, double ps);

/// 0 for the even tiling, 1 for the odd tiling.
constexpr int partition_offset(std::uint64_t t) { return static_cast<int>(t & 1U); }

struct BlockAddress {
    int offset = 0;  // partition parity
    int block_col = 0;
    int block_row = 0;
    int local_col = 0;  // 0 = west column, 1 = east column
    int local_row = 0;  // 0 = north row, 1 = south row
};

/// Block of the tiling active at step t that contains cell (col, row).
BlockAddress locate(int col, int row, std::uint64_t t, int width, int height);

class Grid {
public:
    Grid(int width, int height, int layers, std::uint64_t seed = 0, double dx = 1.0, double dt = 1.0);

    int width() const { return width_; }
    int height() const { return height_; }
    int layers() const { return static_cast<int>(planes_.size()); }
    std::uint64_t time() const { return time_; }
    std::uint64_t seed() const { return seed_; }
    double dx() const { return dx_; }
    double dt() const { return dt_; }
    std::size_t words_per_row() const { return words_per_row_; }

    bool get(int layer, int col, int row) const;
    void set(int layer, int col, int row, bool value);
    std::size_t count(int layer) const;

    std::span<std::uint64_t> row_words(int layer, int row);
    std::span<const std::uint64_t> row_words(int layer, int row) const;

    void advance_time() { ++time_; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.time_ == b.time_ && a.planes_ == b.planes_;
    }

private:
    int width_;
    int height_;
    std::size_t words_per_row_;
    std::uint64_t time_ = 0;
    std::uint64_t seed_;
    double dx_;
    double dt_;
    std::vector<std::vector<std::uint64_t>> planes_;
};

/// Explicit occupancy for one layer, row-major, width * height entries.
struct Bitmap {
    std::vector<std::uint8_t> cells;
};

struct GridConfig {
    int width = 0;
    int height = 0;
    std::uint64_t seed = 0;
    double dx = 1.0;
    double dt = 1.0;
    /// One entry per layer: a fill density in [0, 1] or an explicit bitmap.
    std::vector<std::variant<double, Bitmap>> layers;
};

/// Throws InvalidArgument on odd or non-positive dimensions, densities outside [0, 1],
/// bitmaps of the wrong size, or non-positive dx/dt.
Grid new_grid(const GridConfig& config);

/// Advances every layer by one step (layer i uses rules[i]) and increments the time.
/// Rows of block pairs are split across `threads` workers; the result does not depend on
/// the worker count.
void step(Grid& grid, std::span<const RuleParams> rules, unsigned threads = 1);
void step(Grid& grid, const RuleParams& rule, unsigned threads = 1);

/// "MCA <width> <height> <layers>" followed by a blank-line-separated 0/1 raster per layer.
void write_grid(std::ostream& out, const Grid& grid);
Grid read_grid(std::istream& in, std::uint64_t seed = 0, double dx = 1.0, double dt = 1.0);

}  // namespace mcadiff::mca
