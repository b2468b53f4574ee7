#include "lnip/similarity.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "lnip/errors.hpp"

namespace lnip {

std::string_view metric_name(DistanceMetric metric) noexcept {
    switch (metric) {
        case DistanceMetric::D1: return "d1";
        case DistanceMetric::Euclidean: return "euclidean";
        case DistanceMetric::Manhattan: return "manhattan";
        case DistanceMetric::Canberra: return "canberra";
        case DistanceMetric::ChiSquare: return "chi_square";
    }
    return "?";
}

DistanceMetric parse_metric(std::string_view text) {
    if (text == "chi-square") return DistanceMetric::ChiSquare;
    for (const auto m : kAllMetrics)
        if (metric_name(m) == text) return m;
    throw InvalidInput("unknown distance metric '" + std::string(text) + "'");
}

double distance(DistanceMetric metric, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw InvalidInput("distance: vector lengths differ (" + std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()) + ")");

    const std::size_t n = a.size();
    double sum = 0.0;
    switch (metric) {
        case DistanceMetric::D1:
            for (std::size_t j = 0; j < n; ++j) sum += std::abs(a[j] - b[j]) / (1.0 + a[j] + b[j]);
            return sum;
        case DistanceMetric::Euclidean:
            for (std::size_t j = 0; j < n; ++j) sum += (a[j] - b[j]) * (a[j] - b[j]);
            return std::sqrt(sum);
        case DistanceMetric::Manhattan:
            for (std::size_t j = 0; j < n; ++j) sum += std::abs(a[j] - b[j]);
            return sum;
        case DistanceMetric::Canberra:
            for (std::size_t j = 0; j < n; ++j) {
                const double den = a[j] + b[j];
                if (den != 0.0) sum += std::abs(a[j] - b[j]) / den;
            }
            return sum;
        case DistanceMetric::ChiSquare:
            for (std::size_t j = 0; j < n; ++j) {
                const double den = a[j] + b[j];
                if (den != 0.0) sum += (a[j] - b[j]) * (a[j] - b[j]) / den;
            }
            return 0.5 * sum;
    }
    return sum;
}

std::vector<double> as_weights(const FeatureVector& f, bool normalize) {
    std::vector<double> w(f.bins.begin(), f.bins.end());
    if (normalize) {
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        if (total > 0.0)
            for (auto& v : w) v /= total;
    }
    return w;
}

double distance(DistanceMetric metric, const FeatureVector& a, const FeatureVector& b) {
    if (a.kind != b.kind)
        throw InvalidInput("distance: descriptor kinds differ (" + std::string(kind_name(a.kind)) + " vs " +
                           std::string(kind_name(b.kind)) + ")");
    const auto wa = as_weights(a);
    const auto wb = as_weights(b);
    return distance(metric, wa, wb);
}

}  // namespace lnip
