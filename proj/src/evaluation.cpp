#include "lnip/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <tuple>

#include "lnip/errors.hpp"
#include "lnip/parallel.hpp"

namespace lnip {

QueryScore score_query(const RetrievalResult& result, const std::string& query_category, std::size_t relevant_total,
                       std::size_t n) {
    if (n == 0) throw InvalidInput("score_query: n must be at least 1");
    if (n > result.ranked.size())
        throw InvalidInput("score_query: n=" + std::to_string(n) + " exceeds the " +
                           std::to_string(result.ranked.size()) + " ranked hits");
    if (relevant_total == 0) throw InvalidInput("score_query: relevant_total must be at least 1");

    const auto hits = static_cast<std::size_t>(std::count_if(
        result.ranked.begin(), result.ranked.begin() + static_cast<std::ptrdiff_t>(n),
        [&](const RankedHit& h) { return h.category == query_category; }));

    QueryScore s;
    s.query_id = result.query_id;
    s.n_retrieved = n;
    s.relevant_retrieved = hits;
    s.relevant_total = relevant_total;
    s.precision = static_cast<double>(hits) / static_cast<double>(n);
    s.recall = static_cast<double>(hits) / static_cast<double>(relevant_total);
    return s;
}

std::vector<EvalReport> evaluate(const FeatureIndex& index, DistanceMetric metric, std::span<const std::size_t> n_values,
                                 const EvalOptions& options) {
    if (index.empty()) throw EmptyDataset("evaluate: index is empty");
    const std::size_t count = index.size();
    for (const auto n : n_values)
        if (n == 0 || n > count)
            throw InvalidInput("evaluate: n=" + std::to_string(n) + " outside 1.." + std::to_string(count));
    if (n_values.empty()) return {};

    const auto& entries = index.entries();
    std::vector<std::vector<double>> rows(count);
    parallel_for(count, options.threads, [&](std::size_t i) { rows[i] = as_weights(entries[i].feature, options.normalize); });

    // all metrics are symmetric: fill the upper triangle, mirror it
    std::vector<double> dist(count * count, 0.0);
    parallel_for(count, options.threads, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < count; ++j) dist[i * count + j] = distance(metric, rows[i], rows[j]);
    });
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < i; ++j) dist[i * count + j] = dist[j * count + i];

    std::map<std::string, std::size_t> category_size;
    for (const auto& e : entries) ++category_size[e.category];

    const std::size_t deepest = *std::max_element(n_values.begin(), n_values.end());
    // relevant[q][k]: relevant hits among query q's first n_values[k] results
    std::vector<std::vector<std::size_t>> relevant(count, std::vector<std::size_t>(n_values.size()));
    parallel_for(count, options.threads, [&](std::size_t q) {
        const std::span<const double> row(dist.data() + q * count, count);
        const auto order = rank(row, deepest, q);
        std::vector<std::size_t> prefix(order.size() + 1, 0);
        for (std::size_t r = 0; r < order.size(); ++r)
            prefix[r + 1] = prefix[r] + (entries[order[r]].category == entries[q].category);
        for (std::size_t k = 0; k < n_values.size(); ++k) relevant[q][k] = prefix[n_values[k]];
    });

    std::vector<EvalReport> reports;
    for (std::size_t k = 0; k < n_values.size(); ++k) {
        EvalReport report;
        report.kind = index.kind();
        report.metric = metric;
        report.n_retrieved = n_values[k];
        for (std::size_t q = 0; q < count; ++q) {
            const auto& cat = entries[q].category;
            auto& avg = report.per_category[cat];
            avg.precision += static_cast<double>(relevant[q][k]) / static_cast<double>(n_values[k]);
            avg.recall += static_cast<double>(relevant[q][k]) / static_cast<double>(category_size[cat]);
            ++avg.queries;
        }
        for (auto& [cat, avg] : report.per_category) {
            avg.precision /= static_cast<double>(avg.queries);
            avg.recall /= static_cast<double>(avg.queries);
            report.precision_total += avg.precision;
            report.recall_total += avg.recall;
        }
        const auto categories = static_cast<double>(report.per_category.size());
        report.precision_total /= categories;
        report.recall_total /= categories;
        reports.push_back(std::move(report));
    }
    return reports;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (const char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + '"';
}

std::vector<const EvalReport*> sorted(std::span<const EvalReport> reports) {
    std::vector<const EvalReport*> out;
    for (const auto& r : reports) out.push_back(&r);
    std::stable_sort(out.begin(), out.end(), [](const EvalReport* a, const EvalReport* b) {
        return std::tuple(kind_name(a->kind), metric_name(a->metric), a->n_retrieved) <
               std::tuple(kind_name(b->kind), metric_name(b->metric), b->n_retrieved);
    });
    return out;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    writer(out);
    out.close();
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

void write_report_csv(std::span<const EvalReport> reports, std::ostream& out) {
    out << "kind,metric,n_retrieved,category,avg_precision,avg_recall\n";
    std::ostringstream row;
    row << std::fixed << std::setprecision(6);
    for (const auto* r : sorted(reports)) {
        const auto prefix = std::string(kind_name(r->kind)) + ',' + std::string(metric_name(r->metric)) + ',' +
                            std::to_string(r->n_retrieved) + ',';
        for (const auto& [cat, avg] : r->per_category)
            row << prefix << csv_field(cat) << ',' << avg.precision << ',' << avg.recall << '\n';
        row << prefix << "TOTAL," << r->precision_total << ',' << r->recall_total << '\n';
    }
    out << row.str();
}

void emit_report(std::span<const EvalReport> reports, const std::filesystem::path& path) {
    write_file(path, [&](std::ostream& out) { write_report_csv(reports, out); });
}

void write_curve_csv(std::span<const EvalReport> reports, std::ostream& out) {
    out << "kind,metric,n_retrieved,p_total,r_total\n";
    std::ostringstream row;
    row << std::fixed << std::setprecision(6);
    for (const auto* r : sorted(reports))
        row << kind_name(r->kind) << ',' << metric_name(r->metric) << ',' << r->n_retrieved << ','
            << r->precision_total << ',' << r->recall_total << '\n';
    out << row.str();
}

void emit_curve(std::span<const EvalReport> reports, const std::filesystem::path& path) {
    write_file(path, [&](std::ostream& out) { write_curve_csv(reports, out); });
}

}  // namespace lnip
