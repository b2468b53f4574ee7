#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lnip {

/// Row-major 8-bit grayscale raster.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(std::size_t w, std::size_t h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(w * h, fill) {}
    GrayImage(std::size_t w, std::size_t h, std::vector<std::uint8_t> px);

    std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
    std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
    bool empty() const noexcept { return pixels.empty(); }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

struct ColorImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<Rgb> pixels;
};

struct TileSize {
    std::size_t width = 0;
    std::size_t height = 0;

    friend bool operator==(const TileSize&, const TileSize&) = default;
};

struct DatasetItem {
    std::string id;
    std::string category;
    GrayImage image;
};

/// BT.601 luma, rounded half up: (299 R + 587 G + 114 B + 500) / 1000.
std::uint8_t luma(Rgb px) noexcept;

/// Throws InvalidInput for an empty image.
GrayImage to_grayscale(const ColorImage& color);

/// Non-overlapping tiles in row-major order; the right/bottom remainder is dropped.
/// Tiles must be at least 3x3 and no larger than the image.
std::vector<GrayImage> tile(const GrayImage& image, TileSize size);

/// Parses "WxH" (e.g. "128x128").
TileSize parse_tile_size(std::string_view text);

/// Decodes PNG/JPEG/PGM/PPM (anything imgcodecs reads) to grayscale.
/// Throws IoError when the file cannot be read or decoded.
GrayImage read_image(const std::filesystem::path& path);

/// Writes a grayscale image; the encoder is picked from the extension.
void write_image(const std::filesystem::path& path, const GrayImage& image);

/// File extensions load_dataset treats as images (lowercase, with dot).
bool is_image_extension(const std::filesystem::path& path);

inline constexpr std::string_view kManifestName = "manifest.tsv";

using WarningSink = std::function<void(const std::string&)>;

struct LoadOptions {
    std::optional<TileSize> tiling;
    /// Receives one message per skipped file. Defaults to stderr when empty.
    WarningSink on_warning;
    unsigned threads = 1;
};

/// Loads a labelled dataset.
///
/// `root` is either a directory with one subdirectory per category, a directory
/// holding a `manifest.tsv`, or a manifest file itself. Manifest lines are
/// `<relative-path>\t<category>`, paths relative to the manifest's directory.
///
/// Items come out sorted by relative path; with tiling, each file expands into
/// its tiles in row-major order. Ids are `<category>/<filename>` with a
/// `#<tile-index>` suffix when tiling. Unreadable files are reported through
/// on_warning and skipped; EmptyDataset is thrown when nothing loads.
std::vector<DatasetItem> load_dataset(const std::filesystem::path& root, const LoadOptions& options = {});

}  // namespace lnip
