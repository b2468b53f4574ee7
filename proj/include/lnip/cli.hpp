#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "lnip/descriptors.hpp"
#include "lnip/imaging.hpp"
#include "lnip/similarity.hpp"

namespace lnip::cli {

enum class Command { Tile, Index, Query, Evaluate };

struct RunConfig {
    Command command = Command::Index;
    std::filesystem::path dataset_root;
    std::vector<std::filesystem::path> store_paths;  // evaluate accepts several
    DescriptorKind kind = DescriptorKind::Lnip;
    bool kind_given = false;
    std::vector<DistanceMetric> metrics{DistanceMetric::D1};
    std::vector<std::size_t> n_list;
    std::optional<TileSize> tile_dims;
    bool normalize = false;
    std::filesystem::path output_path;
    std::filesystem::path curve_path;
    std::filesystem::path query_image;
    std::size_t top_n = 10;
    unsigned threads = 0;  // 0 = machine parallelism
};

/// Comma-separated counts; an item may be a range `first:last[:step]` (inclusive).
/// "25:70:5" expands to 25,30,...,70.
std::vector<std::size_t> parse_n_list(std::string_view text);

void cmd_tile(const RunConfig& config, std::ostream& out);
void cmd_index(const RunConfig& config, std::ostream& out, std::ostream& log);
void cmd_query(const RunConfig& config, std::ostream& out);
void cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Parses argv and dispatches. Returns the process exit status:
/// 0 on success, 1 for runtime failures, CLI11's code for usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lnip::cli
