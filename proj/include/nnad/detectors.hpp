#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nnad/dataset.hpp"
#include "nnad/neighbor_index.hpp"

namespace nnad {

enum class Method { knn, kthnn, dtm, dtmf, lof };

inline constexpr double q_infinity = std::numeric_limits<double>::infinity();

/// Mass fraction used when neither k nor a mass is given.
inline constexpr double default_mass = 0.03;

std::string to_string(Method m);
/// Throws InvalidArgument listing the valid names.
Method parse_method(const std::string& name);
const std::vector<std::string>& method_names();

/// Parses "inf"/"infinity" or a real >= 1.
double parse_order(const std::string& text);
std::string format_order(double q);

struct DetectorConfig {
    Method method = Method::dtm;
    double q = 2.0;  ///< dtm only; q_infinity selects the k-th distance
    std::optional<std::size_t> k;
    std::optional<double> mass;  ///< k = ceil(mass * n)

    /// Order actually used: 1 for knn, infinity for kthnn, q for dtm (dtmf uses 2).
    double effective_q() const;

    /// Neighbor count for a sample of n points; throws InvalidArgument when out of range.
    std::size_t resolve_k(std::size_t n) const;
    void validate() const;

    bool operator==(const DetectorConfig&) const = default;
};

/// ceil(mass * n), treating products within 1e-9 (relative) of an integer as that integer, floor 1.
std::size_t k_from_mass(double mass, std::size_t n);

struct ScoreReport {
    std::vector<double> scores;  ///< higher = more anomalous
    DetectorConfig config;
    std::size_t n = 0;
    std::size_t dim = 0;
    std::size_t k = 0;           ///< resolved neighbor count
    std::vector<double> raw;     ///< dtmf only: raw DTMF2 ratio (scores are its reciprocal)
};

/// q-power mean of non-negative values, computed relative to the maximum so large q cannot overflow.
/// q == infinity returns the maximum.
double power_mean(std::span<const double> values, double q);

/// Empirical distance-to-measure at x: q-power mean of the k nearest sample distances.
double dtm_score(const NeighborIndex& index, std::span<const double> x, std::size_t k, double q);

ScoreReport score_dataset(const Dataset& data, const DetectorConfig& config, unsigned threads = 0);
ScoreReport score_dataset(const NeighborIndex& index, const DetectorConfig& config, unsigned threads = 0);

/// a / b clamped to [1e-12, 1e12], with 0 / 0 = 1 and a / 0 = 1e12.
double bounded_ratio(double a, double b) noexcept;

struct Dtmf2Scores {
    std::vector<double> raw;     ///< mean over y in N_k(x) of DTM2(y) / DTM2(x)
    std::vector<double> scores;  ///< 1 / raw
};
Dtmf2Scores dtmf2_scores(const NeighborIndex& index, std::size_t k, unsigned threads = 0);

/// Local outlier factor with k neighbors excluding the point itself. Requires n >= 2, 1 <= k <= n - 1.
std::vector<double> lof_scores(const NeighborIndex& index, std::size_t k, unsigned threads = 0);

struct TopCount {
    std::size_t count;
};
struct ScoreThreshold {
    double value;
};
using Budget = std::variant<TopCount, ScoreThreshold>;

/// TopCount: the `count` highest scores (lower index first among ties); ScoreThreshold: score > value.
std::vector<Label> rank_anomalies(std::span<const double> scores, const Budget& budget);

/// Indices sorted by decreasing score, lower index first among ties.
std::vector<std::size_t> ranking_order(std::span<const double> scores);

}  // namespace nnad
