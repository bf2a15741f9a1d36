#include "nnad/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "nnad/error.hpp"

namespace nnad {

namespace {

void check_inputs(std::span<const double> scores, std::span<const Label> labels, std::size_t& n_pos,
                  std::size_t& n_neg) {
    if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
    for (double s : scores) {
        if (!std::isfinite(s)) throw InvalidArgument("scores must be finite");
    }
    n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::anomaly));
    n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw InvalidArgument("evaluation needs both normal and anomaly labels");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double pearson(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
    std::size_t n_pos = 0, n_neg = 0;
    check_inputs(scores, labels, n_pos, n_neg);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Twice the Mann-Whitney count, kept integral so the result is exact.
    std::uint64_t twice_wins = 0;
    std::uint64_t negatives_below = 0;
    for (std::size_t s = 0; s < order.size();) {
        std::size_t e = s;
        std::uint64_t pos = 0, neg = 0;
        while (e < order.size() && scores[order[e]] == scores[order[s]]) {
            (labels[order[e]] == Label::anomaly ? pos : neg) += 1;
            ++e;
        }
        twice_wins += 2 * pos * negatives_below + pos * neg;
        negatives_below += neg;
        s = e;
    }
    return (static_cast<double>(twice_wins) / 2.0) / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double average_precision(std::span<const double> scores, std::span<const Label> labels) {
    std::size_t n_pos = 0, n_neg = 0;
    check_inputs(scores, labels, n_pos, n_neg);
    const auto order = ranking_order(scores);
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (labels[order[r]] == Label::anomaly) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(n_pos);
}

EvalResult evaluate(std::span<const double> scores, std::span<const Label> labels) {
    EvalResult r;
    check_inputs(scores, labels, r.n_pos, r.n_neg);
    r.auc = roc_auc(scores, labels);
    r.ap = average_precision(scores, labels);
    return r;
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t s = 0; s < order.size();) {
        std::size_t e = s + 1;
        while (e < order.size() && values[order[e]] == values[order[s]]) ++e;
        const double rank = 0.5 * static_cast<double>(s + 1 + e);  // mean of s+1 .. e
        for (std::size_t t = s; t < e; ++t) ranks[order[t]] = rank;
        s = e;
    }
    return ranks;
}

Alternative parse_alternative(const std::string& name) {
    if (name == "two_sided" || name == "two-sided") return Alternative::two_sided;
    if (name == "greater") return Alternative::greater;
    if (name == "less") return Alternative::less;
    throw InvalidArgument("unknown alternative '" + name + "' (valid: two_sided, greater, less)");
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, Alternative alternative,
                                    WilcoxonMethod method) {
    if (a.size() != b.size()) throw InvalidArgument("paired samples differ in length");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (!std::isfinite(d)) throw InvalidArgument("paired values must be finite");
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) throw InvalidArgument("no nonzero differences");
    if (diffs.size() < 5)
        throw InvalidArgument("fewer than 5 nonzero differences (" + std::to_string(diffs.size()) + ")");

    std::vector<double> magnitudes(diffs.size());
    std::transform(diffs.begin(), diffs.end(), magnitudes.begin(), [](double d) { return std::abs(d); });
    const auto ranks = average_ranks(magnitudes);

    WilcoxonResult result;
    result.n_used = diffs.size();
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        if (diffs[i] > 0.0) result.statistic += ranks[i];
    }
    const std::size_t n = diffs.size();
    result.exact = method == WilcoxonMethod::exact || (method == WilcoxonMethod::automatic && n <= 20);
    if (result.exact && n > 40) throw InvalidArgument("exact Wilcoxon distribution limited to 40 pairs");

    double p_upper = 0.0, p_lower = 0.0;  // P(W >= w), P(W <= w)
    if (result.exact) {
        // Doubled ranks are integers; count sign patterns by doubled statistic.
        std::vector<std::size_t> twice(n);
        std::size_t total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            twice[i] = static_cast<std::size_t>(std::lround(2.0 * ranks[i]));
            total += twice[i];
        }
        std::vector<double> counts(total + 1, 0.0);
        counts[0] = 1.0;
        std::size_t reach = 0;
        for (std::size_t r : twice) {
            for (std::size_t s = reach + 1; s-- > 0;) counts[s + r] += counts[s];
            reach += r;
        }
        const auto observed = static_cast<std::size_t>(std::lround(2.0 * result.statistic));
        double upper = 0.0, lower = 0.0;
        for (std::size_t s = 0; s <= total; ++s) {
            if (s >= observed) upper += counts[s];
            if (s <= observed) lower += counts[s];
        }
        const double patterns = std::ldexp(1.0, static_cast<int>(n));
        p_upper = upper / patterns;
        p_lower = lower / patterns;
    } else {
        const double nn = static_cast<double>(n);
        const double mean = nn * (nn + 1.0) / 4.0;
        double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
        auto sorted = ranks;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t s = 0; s < n;) {
            std::size_t e = s + 1;
            while (e < n && sorted[e] == sorted[s]) ++e;
            const double t = static_cast<double>(e - s);
            variance -= (t * t * t - t) / 48.0;
            s = e;
        }
        const double sd = std::sqrt(variance);
        p_upper = 1.0 - normal_cdf((result.statistic - mean - 0.5) / sd);
        p_lower = normal_cdf((result.statistic - mean + 0.5) / sd);
    }
    switch (alternative) {
        case Alternative::greater: result.p_value = p_upper; break;
        case Alternative::less: result.p_value = p_lower; break;
        default: result.p_value = std::min(1.0, 2.0 * std::min(p_upper, p_lower));
    }
    return result;
}

BoundarySummary boundary_misclassification(const LabeledDataset& labeled, const ScoreReport& report,
                                           std::span<const double> boundary_proximity) {
    const std::size_t n = labeled.size();
    if (!labeled.has_labels()) throw InvalidArgument("boundary analysis requires labels");
    if (report.scores.size() != n) throw InvalidArgument("score report does not match the dataset");
    if (boundary_proximity.size() != n) throw InvalidArgument("missing boundary distances: need one value per point");

    BoundarySummary out;
    out.budget = labeled.anomaly_count();
    const auto predicted = rank_anomalies(report.scores, TopCount{out.budget});
    std::vector<double> indicator, proximity;
    double sum_mis = 0.0, sum_ok = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labeled.labels()[i] != Label::normal) continue;
        if (!std::isfinite(boundary_proximity[i])) throw InvalidArgument("boundary distances must be finite");
        const bool wrong = predicted[i] == Label::anomaly;
        if (wrong) {
            out.misclassified.push_back(i);
            sum_mis += boundary_proximity[i];
        } else {
            ++out.correct_count;
            sum_ok += boundary_proximity[i];
        }
        indicator.push_back(wrong ? 1.0 : 0.0);
        proximity.push_back(boundary_proximity[i]);
    }
    if (!out.misclassified.empty()) out.mean_proximity_misclassified = sum_mis / static_cast<double>(out.misclassified.size());
    if (out.correct_count > 0) out.mean_proximity_correct = sum_ok / static_cast<double>(out.correct_count);
    if (!out.misclassified.empty() && out.correct_count > 0) {
        const auto rp = average_ranks(proximity);
        const auto ri = average_ranks(indicator);
        const double rho = pearson(ri, rp);
        if (std::isfinite(rho)) out.rank_correlation = rho;
    }
    return out;
}

}  // namespace nnad
