#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnad/dataset.hpp"
#include "nnad/detectors.hpp"

namespace nnad {

struct EvalResult {
    double auc = 0.0;
    double ap = 0.0;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

/// Mann-Whitney form: P(score of an anomaly > score of a normal), ties count 1/2.
/// Throws InvalidArgument unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

/// Mean over anomalies of the precision at the anomaly's rank. Ranks are by
/// decreasing score with the lower index first among ties (no interpolation).
double average_precision(std::span<const double> scores, std::span<const Label> labels);

EvalResult evaluate(std::span<const double> scores, std::span<const Label> labels);

enum class Alternative { two_sided, greater, less };
enum class WilcoxonMethod { automatic, exact, normal };

struct WilcoxonResult {
    double statistic = 0.0;  ///< sum of ranks of positive differences a - b
    double p_value = 1.0;
    std::size_t n_used = 0;  ///< pairs left after dropping zero differences
    bool exact = false;
};

/**
 * Paired signed-rank test on a - b. Zero differences are dropped; tied |a - b|
 * receive average ranks. `automatic` enumerates the exact null distribution
 * for up to 20 pairs and otherwise uses the normal approximation with tie
 * variance correction and continuity correction. `greater` tests whether a
 * tends to exceed b.
 */
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    Alternative alternative = Alternative::two_sided,
                                    WilcoxonMethod method = WilcoxonMethod::automatic);

Alternative parse_alternative(const std::string& name);

struct BoundarySummary {
    std::size_t budget = 0;                 ///< true anomaly count
    std::vector<std::size_t> misclassified; ///< normal points ranked inside the budget
    std::size_t correct_count = 0;          ///< normal points ranked outside the budget
    std::optional<double> mean_proximity_misclassified;
    std::optional<double> mean_proximity_correct;
    /// Spearman correlation over normal points between the misclassified
    /// indicator and boundary proximity; absent when either is constant.
    std::optional<double> rank_correlation;
};

/**
 * Ranks points by score with the oracle budget (number of true anomalies)
 * and relates normal-point mistakes to `boundary_proximity`: one value per
 * point, larger meaning closer to the edge of the normal support (e.g. the
 * distance from the center of a Gaussian blob). Values at anomalies are ignored.
 */
BoundarySummary boundary_misclassification(const LabeledDataset& labeled, const ScoreReport& report,
                                           std::span<const double> boundary_proximity);

/// Average ranks (1-based), ties share their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace nnad
