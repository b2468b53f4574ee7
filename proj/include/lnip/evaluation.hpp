#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lnip/retrieval.hpp"

namespace lnip {

struct QueryScore {
    std::string query_id;
    std::size_t n_retrieved = 0;
    std::size_t relevant_retrieved = 0;
    std::size_t relevant_total = 0;
    double precision = 0.0;  // relevant_retrieved / n_retrieved
    double recall = 0.0;     // relevant_retrieved / relevant_total
};

/// Scores the first `n` hits of a ranking against the query's category.
/// Throws InvalidInput when n is 0 or exceeds the ranking, or relevant_total is 0.
QueryScore score_query(const RetrievalResult& result, const std::string& query_category, std::size_t relevant_total,
                       std::size_t n);

struct CategoryAverage {
    double precision = 0.0;
    double recall = 0.0;
    std::size_t queries = 0;
};

struct EvalReport {
    DescriptorKind kind = DescriptorKind::Lnip;
    DistanceMetric metric = DistanceMetric::D1;
    std::size_t n_retrieved = 0;
    std::map<std::string, CategoryAverage> per_category;
    double precision_total = 0.0;  // unweighted mean over categories
    double recall_total = 0.0;     // ARR
};

struct EvalOptions {
    bool normalize = false;
    unsigned threads = 1;
};

/// Leave-none-out protocol: every entry queries the whole index (itself included,
/// winning distance ties) and is scored at each n. One report per n, in input order.
std::vector<EvalReport> evaluate(const FeatureIndex& index, DistanceMetric metric, std::span<const std::size_t> n_values,
                                 const EvalOptions& options = {});

/// CSV: kind,metric,n_retrieved,category,avg_precision,avg_recall. Rows are ordered by
/// kind, metric, n, then category; each (kind, metric, n) group ends with a TOTAL row.
void write_report_csv(std::span<const EvalReport> reports, std::ostream& out);
void emit_report(std::span<const EvalReport> reports, const std::filesystem::path& path);

/// CSV: kind,metric,n_retrieved,p_total,r_total, one row per report.
void write_curve_csv(std::span<const EvalReport> reports, std::ostream& out);
void emit_curve(std::span<const EvalReport> reports, const std::filesystem::path& path);

}  // namespace lnip
