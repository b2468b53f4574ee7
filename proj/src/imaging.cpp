#include "lnip/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <set>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "lnip/errors.hpp"
#include "lnip/parallel.hpp"

namespace fs = std::filesystem;

namespace lnip {

GrayImage::GrayImage(std::size_t w, std::size_t h, std::vector<std::uint8_t> px)
    : width(w), height(h), pixels(std::move(px)) {
    if (pixels.size() != width * height)
        throw InvalidInput("pixel buffer holds " + std::to_string(pixels.size()) + " values, expected " +
                           std::to_string(width) + "x" + std::to_string(height));
}

std::uint8_t luma(Rgb px) noexcept {
    const unsigned weighted = 299u * px.r + 587u * px.g + 114u * px.b;
    // max is 255000 + 500, so the quotient never exceeds 255
    return static_cast<std::uint8_t>((weighted + 500u) / 1000u);
}

GrayImage to_grayscale(const ColorImage& color) {
    if (color.width == 0 || color.height == 0 || color.pixels.empty())
        throw InvalidInput("to_grayscale: empty image");
    if (color.pixels.size() != color.width * color.height)
        throw InvalidInput("to_grayscale: pixel count does not match dimensions");

    GrayImage out(color.width, color.height);
    std::transform(color.pixels.begin(), color.pixels.end(), out.pixels.begin(), luma);
    return out;
}

std::vector<GrayImage> tile(const GrayImage& image, TileSize size) {
    if (size.width < 3 || size.height < 3)
        throw InvalidInput("tile: tile dimensions must be at least 3x3");
    if (size.width > image.width || size.height > image.height)
        throw InvalidInput("tile: " + std::to_string(size.width) + "x" + std::to_string(size.height) +
                           " tile does not fit in " + std::to_string(image.width) + "x" +
                           std::to_string(image.height) + " image");

    const std::size_t cols = image.width / size.width;
    const std::size_t rows = image.height / size.height;
    std::vector<GrayImage> tiles;
    tiles.reserve(cols * rows);
    for (std::size_t ty = 0; ty < rows; ++ty) {
        for (std::size_t tx = 0; tx < cols; ++tx) {
            GrayImage t(size.width, size.height);
            for (std::size_t y = 0; y < size.height; ++y) {
                const auto* src = image.pixels.data() + (ty * size.height + y) * image.width + tx * size.width;
                std::copy_n(src, size.width, t.pixels.data() + y * size.width);
            }
            tiles.push_back(std::move(t));
        }
    }
    return tiles;
}

TileSize parse_tile_size(std::string_view text) {
    const auto sep = text.find_first_of("xX");
    auto parse = [&](std::string_view part) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size())
            throw InvalidInput("tile size must look like WxH, got '" + std::string(text) + "'");
        return v;
    };
    if (sep == std::string_view::npos)
        throw InvalidInput("tile size must look like WxH, got '" + std::string(text) + "'");
    return {parse(text.substr(0, sep)), parse(text.substr(sep + 1))};
}

namespace {

GrayImage from_mat(const cv::Mat& decoded) {
    cv::Mat m = decoded;
    if (m.depth() == CV_16U) m.convertTo(m, CV_8U, 1.0 / 257.0);
    if (m.depth() != CV_8U) throw IoError("unsupported pixel depth");

    const auto w = static_cast<std::size_t>(m.cols);
    const auto h = static_cast<std::size_t>(m.rows);
    const int channels = m.channels();

    if (channels == 1) {
        GrayImage out(w, h);
        for (int y = 0; y < m.rows; ++y) std::copy_n(m.ptr<std::uint8_t>(y), w, out.pixels.data() + y * w);
        return out;
    }
    if (channels == 3 || channels == 4) {
        // imgcodecs hands back BGR(A); alpha is ignored
        ColorImage color{w, h, std::vector<Rgb>(w * h)};
        for (int y = 0; y < m.rows; ++y) {
            const auto* row = m.ptr<std::uint8_t>(y);
            for (std::size_t x = 0; x < w; ++x) {
                const auto* p = row + x * channels;
                color.pixels[y * w + x] = Rgb{p[2], p[1], p[0]};
            }
        }
        return to_grayscale(color);
    }
    throw IoError("unsupported channel count " + std::to_string(channels));
}

}  // namespace

GrayImage read_image(const fs::path& path) {
    cv::Mat m;
    try {
        m = cv::imread(path.string(), cv::IMREAD_UNCHANGED | cv::IMREAD_ANYDEPTH);
    } catch (const cv::Exception& e) {
        throw IoError("cannot decode " + path.string() + ": " + e.what());
    }
    if (m.empty()) throw IoError("cannot read image " + path.string());
    try {
        return from_mat(m);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_image(const fs::path& path, const GrayImage& image) {
    if (image.empty()) throw InvalidInput("write_image: empty image");
    cv::Mat m(static_cast<int>(image.height), static_cast<int>(image.width), CV_8UC1,
              const_cast<std::uint8_t*>(image.pixels.data()));
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), m);
    } catch (const cv::Exception& e) {
        throw IoError("cannot write " + path.string() + ": " + e.what());
    }
    if (!ok) throw IoError("cannot write " + path.string());
}

bool is_image_extension(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    static const std::set<std::string> known{".png", ".jpg", ".jpeg", ".pgm", ".ppm", ".pnm", ".bmp", ".tif", ".tiff"};
    return known.contains(ext);
}

namespace {

struct SourceFile {
    fs::path path;
    std::string rel;  // sort key
    std::string category;
};

std::string trim_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::vector<SourceFile> read_manifest(const fs::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw IoError("cannot open manifest " + manifest.string());

    const fs::path base = manifest.parent_path();
    std::vector<SourceFile> files;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim_cr(line);
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
            line.find('\t', tab + 1) != std::string::npos)
            throw ParseError(lineno, "manifest line must be <relative-path><TAB><category>");
        const fs::path rel = line.substr(0, tab);
        files.push_back({base / rel, rel.generic_string(), line.substr(tab + 1)});
    }
    return files;
}

std::vector<SourceFile> scan_category_dirs(const fs::path& root) {
    std::vector<SourceFile> files;
    for (const auto& cat : fs::directory_iterator(root)) {
        if (!cat.is_directory()) continue;
        const std::string category = cat.path().filename().string();
        for (const auto& f : fs::directory_iterator(cat.path())) {
            if (!f.is_regular_file() || !is_image_extension(f.path())) continue;
            files.push_back({f.path(), fs::relative(f.path(), root).generic_string(), category});
        }
    }
    return files;
}

}  // namespace

std::vector<DatasetItem> load_dataset(const fs::path& root, const LoadOptions& options) {
    std::error_code ec;
    if (!fs::exists(root, ec)) throw IoError("dataset root does not exist: " + root.string());

    std::vector<SourceFile> files;
    if (fs::is_regular_file(root))
        files = read_manifest(root);
    else if (fs::is_regular_file(root / kManifestName))
        files = read_manifest(root / kManifestName);
    else
        files = scan_category_dirs(root);

    std::sort(files.begin(), files.end(), [](const SourceFile& a, const SourceFile& b) { return a.rel < b.rel; });

    const WarningSink warn = options.on_warning ? options.on_warning
                                                : WarningSink([](const std::string& m) {
                                                      std::cerr << "warning: " << m << '\n';
                                                  });

    // decode in parallel, then assemble in sorted order
    std::vector<std::optional<GrayImage>> decoded(files.size());
    std::vector<std::string> failures(files.size());
    parallel_for(files.size(), options.threads, [&](std::size_t i) {
        try {
            decoded[i] = read_image(files[i].path);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    std::vector<DatasetItem> items;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!decoded[i]) {
            warn("skipping " + files[i].path.string() + ": " + failures[i]);
            continue;
        }
        const std::string base_id = files[i].category + "/" + files[i].path.filename().string();
        auto add = [&](std::string id, GrayImage img) {
            if (!seen.insert(id).second) throw InvalidInput("duplicate dataset id '" + id + "'");
            items.push_back({std::move(id), files[i].category, std::move(img)});
        };
        if (!options.tiling) {
            add(base_id, std::move(*decoded[i]));
            continue;
        }
        std::vector<GrayImage> tiles;
        try {
            tiles = tile(*decoded[i], *options.tiling);
        } catch (const InvalidInput& e) {
            warn("skipping " + files[i].path.string() + ": " + e.what());
            continue;
        }
        for (std::size_t t = 0; t < tiles.size(); ++t) add(base_id + "#" + std::to_string(t), std::move(tiles[t]));
    }

    if (items.empty()) throw EmptyDataset("no images loaded from " + root.string());
    return items;
}

}  // namespace lnip
