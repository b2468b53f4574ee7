#include "lnip/descriptors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "lnip/errors.hpp"
#include "lnip/parallel.hpp"

namespace lnip {

Window3x3 Window3x3::from_raster(const std::array<std::uint8_t, 9>& raster) {
    Window3x3 w;
    w.center = raster[4];
    for (std::size_t i = 0; i < 8; ++i) {
        const auto [dx, dy] = kNeighborOffsets[i];
        w.neighbors[i] = raster[static_cast<std::size_t>((dy + 1) * 3 + (dx + 1))];
    }
    return w;
}

Window3x3 window_at(const GrayImage& img, std::size_t x, std::size_t y) {
    Window3x3 w;
    w.center = img.at(x, y);
    for (std::size_t i = 0; i < 8; ++i) {
        const auto [dx, dy] = kNeighborOffsets[i];
        w.neighbors[i] = img.at(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(x) + dx),
                                static_cast<std::size_t>(static_cast<std::ptrdiff_t>(y) + dy));
    }
    return w;
}

AdjacencySet adjacency_set(int i) {
    if (i < 1 || i > 8) throw InvalidInput("adjacency_set: neighbor index " + std::to_string(i) + " outside 1..8");
    return kAdjacency[static_cast<std::size_t>(i - 1)];
}

std::uint8_t lbp_code(const Window3x3& w) noexcept {
    unsigned code = 0;
    for (unsigned i = 0; i < 8; ++i) code |= static_cast<unsigned>(w.neighbors[i] >= w.center) << i;
    return static_cast<std::uint8_t>(code);
}

namespace {

int mismatches(const Window3x3& w, int i) noexcept {
    const auto& adj = kAdjacency[static_cast<std::size_t>(i - 1)];
    const int own = w.neighbor(i);
    int count = 0;
    for (const int k : adj.indices()) {
        const int s = w.neighbor(k);
        count += (s >= own) != (s >= w.center);
    }
    return count;
}

}  // namespace

int sign_mismatch_count(const Window3x3& w, int i) {
    if (i < 1 || i > 8) throw InvalidInput("sign_mismatch_count: index outside 1..8");
    return mismatches(w, i);
}

std::uint8_t lnip_s_code(const Window3x3& w) noexcept {
    unsigned code = 0;
    for (int i = 1; i <= 8; ++i) {
        const auto m = static_cast<int>(kAdjacency[static_cast<std::size_t>(i - 1)].size);
        // count >= M/2 without leaving the integers
        code |= static_cast<unsigned>(2 * mismatches(w, i) >= m) << (i - 1);
    }
    return static_cast<std::uint8_t>(code);
}

namespace {

int deviation_sum(const Window3x3& w, int i) {
    const int own = w.neighbor(i);
    int sum = 0;
    for (const int k : kAdjacency[static_cast<std::size_t>(i - 1)].indices()) sum += std::abs(w.neighbor(k) - own);
    return sum;
}

int center_deviation_sum(const Window3x3& w) noexcept {
    int sum = 0;
    for (const auto n : w.neighbors) sum += std::abs(int{n} - int{w.center});
    return sum;
}

}  // namespace

double neighbor_deviation(const Window3x3& w, int i) {
    if (i < 1 || i > 8) throw InvalidInput("neighbor_deviation: index outside 1..8");
    return static_cast<double>(deviation_sum(w, i)) /
           static_cast<double>(kAdjacency[static_cast<std::size_t>(i - 1)].size);
}

double center_deviation(const Window3x3& w) noexcept { return center_deviation_sum(w) / 8.0; }

std::uint8_t lnip_m_code(const Window3x3& w) noexcept {
    // M_i >= T_c  <=>  sum_i / M >= sum_c / 8  <=>  8 * sum_i >= M * sum_c
    const int center_sum = center_deviation_sum(w);
    unsigned code = 0;
    for (int i = 1; i <= 8; ++i) {
        const auto m = static_cast<int>(kAdjacency[static_cast<std::size_t>(i - 1)].size);
        code |= static_cast<unsigned>(8 * deviation_sum(w, i) >= m * center_sum) << (i - 1);
    }
    return static_cast<std::uint8_t>(code);
}

std::string_view kind_name(DescriptorKind kind) noexcept {
    switch (kind) {
        case DescriptorKind::Lbp: return "LBP";
        case DescriptorKind::LnipSign: return "LNIP_S";
        case DescriptorKind::LnipMagnitude: return "LNIP_M";
        case DescriptorKind::Lnip: return "LNIP";
    }
    return "?";
}

DescriptorKind parse_kind(std::string_view text) {
    std::string key(text);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
        return c == '-' ? '_' : static_cast<char>(std::toupper(c));
    });
    for (const auto k : {DescriptorKind::Lbp, DescriptorKind::LnipSign, DescriptorKind::LnipMagnitude, DescriptorKind::Lnip})
        if (kind_name(k) == key) return k;
    throw InvalidInput("unknown descriptor kind '" + std::string(text) + "'");
}

std::size_t feature_length(DescriptorKind kind) noexcept { return kind == DescriptorKind::Lnip ? 512 : 256; }

namespace {

template <std::uint8_t (*Code)(const Window3x3&) noexcept>
void sweep_rows(const GrayImage& img, PatternMap& out, unsigned threads) {
    parallel_for(out.height, threads, [&](std::size_t row) {
        const std::size_t y = row + 1;
        auto* dst = out.codes.data() + row * out.width;
        for (std::size_t x = 1; x + 1 < img.width; ++x) dst[x - 1] = Code(window_at(img, x, y));
    });
}

}  // namespace

PatternMap pattern_map(const GrayImage& img, PatternKernel kernel, unsigned threads) {
    if (img.width < 3 || img.height < 3)
        throw InvalidInput("pattern_map: image is " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                           ", need at least 3x3");
    if (img.pixels.size() != img.width * img.height) throw InvalidInput("pattern_map: pixel buffer size mismatch");

    PatternMap out;
    out.width = img.width - 2;
    out.height = img.height - 2;
    out.kernel = kernel;
    out.codes.resize(out.width * out.height);
    switch (kernel) {
        case PatternKernel::Lbp: sweep_rows<lbp_code>(img, out, threads); break;
        case PatternKernel::LnipSign: sweep_rows<lnip_s_code>(img, out, threads); break;
        case PatternKernel::LnipMagnitude: sweep_rows<lnip_m_code>(img, out, threads); break;
    }
    return out;
}

namespace {

DescriptorKind kind_of(PatternKernel kernel) {
    switch (kernel) {
        case PatternKernel::Lbp: return DescriptorKind::Lbp;
        case PatternKernel::LnipSign: return DescriptorKind::LnipSign;
        case PatternKernel::LnipMagnitude: return DescriptorKind::LnipMagnitude;
    }
    return DescriptorKind::Lbp;
}

void accumulate(const PatternMap& map, std::span<std::uint32_t> bins) {
    for (const auto c : map.codes) ++bins[c];
}

}  // namespace

FeatureVector histogram(const PatternMap& map) {
    if (map.codes.empty()) throw InvalidInput("histogram: empty pattern map");
    FeatureVector f{kind_of(map.kernel), std::vector<std::uint32_t>(256, 0)};
    accumulate(map, f.bins);
    return f;
}

FeatureVector extract_feature(const GrayImage& img, DescriptorKind kind, unsigned threads) {
    switch (kind) {
        case DescriptorKind::Lbp: return histogram(pattern_map(img, PatternKernel::Lbp, threads));
        case DescriptorKind::LnipSign: return histogram(pattern_map(img, PatternKernel::LnipSign, threads));
        case DescriptorKind::LnipMagnitude: return histogram(pattern_map(img, PatternKernel::LnipMagnitude, threads));
        case DescriptorKind::Lnip: break;
    }
    FeatureVector f{DescriptorKind::Lnip, std::vector<std::uint32_t>(512, 0)};
    const std::span<std::uint32_t> all(f.bins);
    accumulate(pattern_map(img, PatternKernel::LnipSign, threads), all.first(256));
    accumulate(pattern_map(img, PatternKernel::LnipMagnitude, threads), all.last(256));
    return f;
}

}  // namespace lnip
