#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "lnip/descriptors.hpp"

namespace lnip {

enum class DistanceMetric { D1, Euclidean, Manhattan, Canberra, ChiSquare };

inline constexpr DistanceMetric kAllMetrics[] = {DistanceMetric::D1, DistanceMetric::Euclidean, DistanceMetric::Manhattan,
                                                 DistanceMetric::Canberra, DistanceMetric::ChiSquare};

/// d1, euclidean, manhattan, canberra, chi_square
std::string_view metric_name(DistanceMetric metric) noexcept;

/// Accepts the names above; "chi-square" is accepted as a spelling of chi_square.
DistanceMetric parse_metric(std::string_view text);

/// Dissimilarity between two histograms, summed in ascending bin order.
///
///   d1         sum |a-b| / (1 + a + b)
///   euclidean  sqrt(sum (a-b)^2)
///   manhattan  sum |a-b|
///   canberra   sum |a-b| / (a + b)
///   chi_square 1/2 sum (a-b)^2 / (a + b)
///
/// Canberra and chi-square terms with a zero denominator contribute 0.
/// Throws InvalidInput on a length mismatch.
double distance(DistanceMetric metric, std::span<const double> a, std::span<const double> b);

/// Also rejects mismatched descriptor kinds.
double distance(DistanceMetric metric, const FeatureVector& a, const FeatureVector& b);

/// Bin counts as doubles; divided by their total when `normalize` is set.
std::vector<double> as_weights(const FeatureVector& f, bool normalize = false);

}  // namespace lnip
