#include "lnip/retrieval.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lnip/errors.hpp"
#include "lnip/parallel.hpp"

namespace lnip {

namespace {

constexpr std::string_view kMagic = "LNIPSTORE";
constexpr std::string_view kVersion = "v1";

bool has_separator(const std::string& s) { return s.find_first_of("\t\r\n") != std::string::npos; }

}  // namespace

void FeatureIndex::add(IndexEntry entry) {
    if (entry.feature.kind != kind_)
        throw InvalidInput("entry '" + entry.id + "' has kind " + std::string(kind_name(entry.feature.kind)) +
                           ", index holds " + std::string(kind_name(kind_)));
    if (entry.feature.bins.size() != feature_length())
        throw InvalidInput("entry '" + entry.id + "' has " + std::to_string(entry.feature.bins.size()) +
                           " bins, expected " + std::to_string(feature_length()));
    if (!ids_.insert(entry.id).second) throw InvalidInput("duplicate index id '" + entry.id + "'");
    entries_.push_back(std::move(entry));
}

FeatureIndex build_index(const std::vector<DatasetItem>& items, DescriptorKind kind, unsigned threads) {
    if (items.empty()) throw EmptyDataset("build_index: no items");
    for (const auto& item : items)
        if (item.image.width < 3 || item.image.height < 3)
            throw InvalidInput("image '" + item.id + "' is " + std::to_string(item.image.width) + "x" +
                               std::to_string(item.image.height) + ", need at least 3x3");

    std::vector<FeatureVector> features(items.size());
    parallel_for(items.size(), threads, [&](std::size_t i) { features[i] = extract_feature(items[i].image, kind); });

    FeatureIndex index(kind);
    for (std::size_t i = 0; i < items.size(); ++i) index.add({items[i].id, items[i].category, std::move(features[i])});
    return index;
}

std::vector<std::size_t> rank(std::span<const double> distances, std::size_t top_n,
                              std::optional<std::size_t> preferred) {
    std::vector<std::size_t> order(distances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto before = [&](std::size_t a, std::size_t b) {
        if (distances[a] != distances[b]) return distances[a] < distances[b];
        if (preferred && (a == *preferred || b == *preferred)) return a == *preferred;
        return a < b;
    };
    const std::size_t n = std::min(top_n, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), before);
    order.resize(n);
    return order;
}

RetrievalResult query(const FeatureIndex& index, const FeatureVector& q, DistanceMetric metric, std::size_t top_n,
                      const QueryOptions& options) {
    if (top_n == 0) throw InvalidInput("query: top_n must be at least 1");
    if (q.kind != index.kind())
        throw InvalidInput("query: feature kind " + std::string(kind_name(q.kind)) + " does not match index kind " +
                           std::string(kind_name(index.kind())));
    if (q.bins.size() != index.feature_length())
        throw InvalidInput("query: feature has " + std::to_string(q.bins.size()) + " bins, index expects " +
                           std::to_string(index.feature_length()));

    const auto qw = as_weights(q, options.normalize);
    const auto& entries = index.entries();
    std::vector<double> dist(entries.size());
    parallel_for(entries.size(), options.threads, [&](std::size_t i) {
        dist[i] = distance(metric, qw, as_weights(entries[i].feature, options.normalize));
    });

    RetrievalResult result{options.query_id, {}};
    for (const auto pos : rank(dist, top_n))
        result.ranked.push_back({entries[pos].id, entries[pos].category, dist[pos], pos});
    return result;
}

void save_index(const FeatureIndex& index, const std::filesystem::path& path) {
    for (const auto& e : index.entries()) {
        if (e.id.empty() || has_separator(e.id)) throw InvalidInput("id '" + e.id + "' cannot be stored");
        if (e.category.empty() || has_separator(e.category))
            throw InvalidInput("category '" + e.category + "' of '" + e.id + "' cannot be stored");
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");

    out << kMagic << ' ' << kVersion << ' ' << kind_name(index.kind()) << ' ' << index.feature_length() << '\n';
    for (const auto& e : index.entries()) {
        out << e.id << '\t' << e.category << '\t';
        for (std::size_t j = 0; j < e.feature.bins.size(); ++j) {
            if (j) out << ',';
            out << e.feature.bins[j];
        }
        out << '\n';
    }
    out.close();
    if (!out) throw IoError("failed writing " + path.string());
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto at = s.find(sep, start);
        parts.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
        if (at == std::string_view::npos) break;
        start = at + 1;
    }
    return parts;
}

template <class T>
bool parse_unsigned(std::string_view text, T& value) {
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return !text.empty() && ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

FeatureIndex load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open feature store " + path.string());

    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split(line, ' ');
    if (header.size() != 4 || header[0] != kMagic)
        throw ParseError(1, "header must be '" + std::string(kMagic) + " v1 <kind> <bins>'");
    if (header[1] != kVersion) throw ParseError(1, "unsupported store version '" + std::string(header[1]) + "'");

    DescriptorKind kind{};
    bool known = false;
    for (const auto k : {DescriptorKind::Lbp, DescriptorKind::LnipSign, DescriptorKind::LnipMagnitude, DescriptorKind::Lnip})
        if (kind_name(k) == header[2]) {
            kind = k;
            known = true;
        }
    if (!known) throw ParseError(1, "unknown kind '" + std::string(header[2]) + "'");

    std::size_t bins = 0;
    if (!parse_unsigned(header[3], bins)) throw ParseError(1, "bin count is not a number");
    if (bins != feature_length(kind))
        throw ParseError(1, std::string(header[2]) + " features have " + std::to_string(feature_length(kind)) +
                                " bins, header declares " + std::to_string(bins));

    FeatureIndex index(kind);
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        const auto fields = split(line, '\t');
        if (fields.size() != 3) throw ParseError(lineno, "record must be <id>\\t<category>\\t<bins>");
        if (fields[0].empty()) throw ParseError(lineno, "empty id");
        if (fields[1].empty()) throw ParseError(lineno, "empty category");

        const auto values = split(fields[2], ',');
        if (values.size() != bins)
            throw ParseError(lineno, "record has " + std::to_string(values.size()) + " bins, header declares " +
                                         std::to_string(bins));

        FeatureVector f{kind, std::vector<std::uint32_t>(bins)};
        for (std::size_t j = 0; j < bins; ++j)
            if (!parse_unsigned(values[j], f.bins[j]))
                throw ParseError(lineno, "bin " + std::to_string(j) + " is not an unsigned integer");

        std::string id(fields[0]);
        if (index.contains(id)) throw ParseError(lineno, "duplicate id '" + id + "'");
        index.add({std::move(id), std::string(fields[1]), std::move(f)});
    }
    if (in.bad()) throw IoError("failed reading " + path.string());
    return index;
}

}  // namespace lnip
