#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "lnip/descriptors.hpp"
#include "lnip/imaging.hpp"
#include "lnip/similarity.hpp"

namespace lnip {

struct IndexEntry {
    std::string id;
    std::string category;
    FeatureVector feature;

    friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

/// Labelled feature records of a single descriptor kind, kept in insertion order.
class FeatureIndex {
public:
    explicit FeatureIndex(DescriptorKind kind) : kind_(kind) {}

    DescriptorKind kind() const noexcept { return kind_; }
    std::size_t feature_length() const noexcept { return lnip::feature_length(kind_); }
    const std::vector<IndexEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    /// Rejects a foreign kind, a wrong bin count, or a repeated id (InvalidInput).
    void add(IndexEntry entry);

    bool contains(const std::string& id) const { return ids_.contains(id); }

    friend bool operator==(const FeatureIndex& a, const FeatureIndex& b) {
        return a.kind_ == b.kind_ && a.entries_ == b.entries_;
    }

private:
    DescriptorKind kind_;
    std::vector<IndexEntry> entries_;
    std::unordered_set<std::string> ids_;
};

struct RankedHit {
    std::string id;
    std::string category;
    double distance = 0.0;
    std::size_t position = 0;  // slot in the index
};

struct RetrievalResult {
    std::string query_id;
    std::vector<RankedHit> ranked;
};

struct QueryOptions {
    bool normalize = false;  // L1-normalize histograms before measuring
    unsigned threads = 1;
    std::string query_id;
};

/// Extracts one feature per item, preserving item order.
/// Throws EmptyDataset for no items and InvalidInput naming the id of an undersized image.
FeatureIndex build_index(const std::vector<DatasetItem>& items, DescriptorKind kind, unsigned threads = 1);

/// Positions of the `top_n` smallest distances, ascending. Ties go to `preferred`
/// first (when given), then to the lower position.
std::vector<std::size_t> rank(std::span<const double> distances, std::size_t top_n,
                              std::optional<std::size_t> preferred = std::nullopt);

/// Exhaustive scan of the index. Returns min(top_n, size) hits, nearest first.
RetrievalResult query(const FeatureIndex& index, const FeatureVector& q, DistanceMetric metric, std::size_t top_n,
                      const QueryOptions& options = {});

/// Text store:
///
///     LNIPSTORE v1 <kind> <bins>
///     <id>\t<category>\t<b0>,<b1>,...
void save_index(const FeatureIndex& index, const std::filesystem::path& path);

/// Throws ParseError (with the offending line) on malformed content, IoError when unreadable.
FeatureIndex load_index(const std::filesystem::path& path);

}  // namespace lnip
