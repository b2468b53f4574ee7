#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lnip/imaging.hpp"

namespace lnip {

/// Neighbor layout around the center pixel (1-based labels):
///
///     I8 I1 I2
///     I7 Ic I3
///     I6 I5 I4
///
/// Odd labels sit on the edges of the window and touch four other ring
/// pixels; even labels are corners and touch two.
struct Offset {
    int dx;
    int dy;
};

inline constexpr std::array<Offset, 8> kNeighborOffsets{{
    {0, -1},   // I1 top-middle
    {1, -1},   // I2 top-right
    {1, 0},    // I3 right-middle
    {1, 1},    // I4 bottom-right
    {0, 1},    // I5 bottom-middle
    {-1, 1},   // I6 bottom-left
    {-1, 0},   // I7 left-middle
    {-1, -1},  // I8 top-left
}};

struct Window3x3 {
    std::uint8_t center = 0;
    std::array<std::uint8_t, 8> neighbors{};  // I1..I8

    /// 1-based access matching the I_1..I_8 labels.
    std::uint8_t neighbor(int i) const { return neighbors[static_cast<std::size_t>(i - 1)]; }

    /// Builds a window from a row-major 3x3 raster (top row first).
    static Window3x3 from_raster(const std::array<std::uint8_t, 9>& raster);
};

/// Window centered on (x, y); caller guarantees 1 <= x < width-1, 1 <= y < height-1.
Window3x3 window_at(const GrayImage& img, std::size_t x, std::size_t y);

/// Ring neighbors adjacent to neighbor `owner`, in formula order.
struct AdjacencySet {
    int owner = 0;
    std::array<int, 4> members{};
    std::size_t size = 0;

    std::span<const int> indices() const { return {members.data(), size}; }
};

namespace detail {

constexpr int wrap8(int v) { return v == 0 ? 8 : v; }

constexpr AdjacencySet make_adjacency(int i) {
    AdjacencySet s{};
    s.owner = i;
    if (i % 2 == 1) {
        s.members = {1 + (i + 5) % 7, 1 + (i + 6) % 9, i + 1, wrap8((i + 2) % 8)};
        s.size = 4;
    } else {
        s.members = {i - 1, wrap8((i + 1) % 8), 0, 0};
        s.size = 2;
    }
    return s;
}

constexpr std::array<AdjacencySet, 8> make_adjacency_table() {
    std::array<AdjacencySet, 8> t{};
    for (int i = 1; i <= 8; ++i) t[static_cast<std::size_t>(i - 1)] = make_adjacency(i);
    return t;
}

}  // namespace detail

inline constexpr std::array<AdjacencySet, 8> kAdjacency = detail::make_adjacency_table();

/// Throws InvalidInput unless 1 <= i <= 8.
AdjacencySet adjacency_set(int i);

std::uint8_t lbp_code(const Window3x3& w) noexcept;
std::uint8_t lnip_s_code(const Window3x3& w) noexcept;
std::uint8_t lnip_m_code(const Window3x3& w) noexcept;

/// Number of positions where "S_i(k) >= I_i" and "S_i(k) >= I_c" disagree.
int sign_mismatch_count(const Window3x3& w, int i);

/// Mean absolute deviation of S_i about I_i.
double neighbor_deviation(const Window3x3& w, int i);

/// Mean absolute deviation of the eight neighbors about the center.
double center_deviation(const Window3x3& w) noexcept;

enum class PatternKernel { Lbp, LnipSign, LnipMagnitude };

enum class DescriptorKind { Lbp, LnipSign, LnipMagnitude, Lnip };

/// Store/report names: LBP, LNIP_S, LNIP_M, LNIP.
std::string_view kind_name(DescriptorKind kind) noexcept;

/// Accepts store names and the CLI spellings (lbp, lnip-s, lnip-m, lnip), case-insensitively.
DescriptorKind parse_kind(std::string_view text);

/// 256 for single patterns, 512 for LNIP.
std::size_t feature_length(DescriptorKind kind) noexcept;

struct PatternMap {
    std::size_t width = 0;
    std::size_t height = 0;
    PatternKernel kernel = PatternKernel::Lbp;
    std::vector<std::uint8_t> codes;

    std::uint8_t at(std::size_t x, std::size_t y) const { return codes[y * width + x]; }
};

/// One code per interior pixel; throws InvalidInput for images smaller than 3x3.
/// Rows are split across `threads` workers (0 = machine parallelism).
PatternMap pattern_map(const GrayImage& img, PatternKernel kernel, unsigned threads = 1);

struct FeatureVector {
    DescriptorKind kind = DescriptorKind::Lbp;
    std::vector<std::uint32_t> bins;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// 256-bin code histogram; kind follows the map's kernel.
FeatureVector histogram(const PatternMap& map);

/// LNIP concatenates the sign histogram followed by the magnitude histogram.
FeatureVector extract_feature(const GrayImage& img, DescriptorKind kind, unsigned threads = 1);

}  // namespace lnip
