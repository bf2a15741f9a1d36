#include "nnad/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nnad/csv.hpp"
#include "nnad/error.hpp"
#include "nnad/parallel.hpp"

namespace nnad {

namespace {

constexpr double ratio_cap = 1e12;

std::vector<NeighborList> neighbors_excluding_self(const NeighborIndex& index, std::size_t k, unsigned threads) {
    std::vector<NeighborList> lists(index.size());
    parallel_for(index.size(), threads, [&](std::size_t i) {
        NeighborList l = index.query(index.point(i), k + 1);
        const auto it = std::find(l.indices.begin(), l.indices.end(), i);
        const auto pos = it == l.indices.end() ? static_cast<std::ptrdiff_t>(k) : it - l.indices.begin();
        l.indices.erase(l.indices.begin() + pos);
        l.distances.erase(l.distances.begin() + pos);
        lists[i] = std::move(l);
    });
    return lists;
}

}  // namespace

const std::vector<std::string>& method_names() {
    static const std::vector<std::string> names = {"knn", "kthnn", "dtm", "dtmf", "lof"};
    return names;
}

std::string to_string(Method m) { return method_names()[static_cast<std::size_t>(m)]; }

Method parse_method(const std::string& name) {
    const auto& names = method_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<Method>(i);
    }
    std::string valid;
    for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
    throw InvalidArgument("unknown method '" + name + "' (valid: " + valid + ")");
}

double parse_order(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "Inf") return q_infinity;
    const auto v = parse_double(text);
    if (!v || !(*v >= 1.0)) throw InvalidArgument("q must be a real >= 1 or 'inf', got '" + text + "'");
    return *v;
}

std::string format_order(double q) { return std::isinf(q) ? "inf" : format_double(q); }

double DetectorConfig::effective_q() const {
    switch (method) {
        case Method::knn: return 1.0;
        case Method::kthnn: return q_infinity;
        case Method::dtmf: return 2.0;
        default: return q;
    }
}

void DetectorConfig::validate() const {
    if (k && mass) throw InvalidArgument("give either k or a mass, not both");
    if (method == Method::dtm && !(q >= 1.0)) throw InvalidArgument("q must be >= 1");
    if (mass && !(*mass > 0.0 && *mass < 1.0)) throw InvalidArgument("mass must lie in (0, 1)");
    if (k && *k < 1) throw InvalidArgument("k must be >= 1");
}

std::size_t k_from_mass(double mass, std::size_t n) {
    const double x = mass * static_cast<double>(n);
    const double r = std::round(x);
    const double k = std::abs(x - r) <= 1e-9 * std::max(1.0, x) ? r : std::ceil(x);
    return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

std::size_t DetectorConfig::resolve_k(std::size_t n) const {
    validate();
    const std::size_t resolved = k ? *k : k_from_mass(mass.value_or(default_mass), n);
    const std::size_t limit = method == Method::lof ? n - 1 : n;
    if (method == Method::lof && n < 2) throw InvalidArgument("LOF needs at least 2 points");
    if (resolved < 1 || resolved > limit)
        throw InvalidArgument("k = " + std::to_string(resolved) + " out of range [1, " + std::to_string(limit) + "]");
    return resolved;
}

double power_mean(std::span<const double> values, double q) {
    if (values.empty()) throw InvalidArgument("power mean of an empty set");
    if (!(q >= 1.0)) throw InvalidArgument("q must be >= 1");
    const double k = static_cast<double>(values.size());
    if (q == 1.0) return std::accumulate(values.begin(), values.end(), 0.0) / k;
    const double top = *std::max_element(values.begin(), values.end());
    if (std::isinf(q) || top == 0.0) return top;
    double sum = 0.0;
    if (q == 2.0) {
        for (double v : values) sum += (v / top) * (v / top);
    } else {
        for (double v : values) sum += std::pow(v / top, q);
    }
    return top * std::pow(sum / k, 1.0 / q);
}

double dtm_score(const NeighborIndex& index, std::span<const double> x, std::size_t k, double q) {
    if (!(q >= 1.0)) throw InvalidArgument("q must be >= 1");
    if (index.strategy() == SearchStrategy::sorted_line) {
        if (x.size() != 1) throw InvalidArgument("query dimension does not match the index");
        const auto window = index.line_window(x[0], k);
        thread_local std::vector<double> distances;
        distances.resize(k);
        for (std::size_t i = 0; i < k; ++i) distances[i] = std::abs(window[i] - x[0]);
        return power_mean(distances, q);
    }
    return power_mean(index.query(x, k).distances, q);
}

double bounded_ratio(double a, double b) noexcept {
    if (b == 0.0) return a == 0.0 ? 1.0 : ratio_cap;
    return std::clamp(a / b, 1.0 / ratio_cap, ratio_cap);
}

Dtmf2Scores dtmf2_scores(const NeighborIndex& index, std::size_t k, unsigned threads) {
    const std::size_t n = index.size();
    if (k < 1 || k > n) throw InvalidArgument("k out of range for DTMF2");
    const auto lists = index.query_all(k, threads);
    std::vector<double> dtm2(n);
    for (std::size_t i = 0; i < n; ++i) dtm2[i] = power_mean(lists[i].distances, 2.0);
    Dtmf2Scores out{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j : lists[i].indices) sum += bounded_ratio(dtm2[j], dtm2[i]);
        out.raw[i] = sum / static_cast<double>(k);
        out.scores[i] = 1.0 / out.raw[i];
    }
    return out;
}

std::vector<double> lof_scores(const NeighborIndex& index, std::size_t k, unsigned threads) {
    const std::size_t n = index.size();
    if (n < 2) throw InvalidArgument("LOF needs at least 2 points");
    if (k < 1 || k > n - 1) throw InvalidArgument("k out of range [1, n-1] for LOF");
    const auto lists = neighbors_excluding_self(index, k, threads);

    std::vector<double> k_distance(n);
    for (std::size_t i = 0; i < n; ++i) k_distance[i] = lists[i].distances.back();
    // Mean reachability distance; local reachability density is its reciprocal.
    std::vector<double> reach(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t t = 0; t < k; ++t) sum += std::max(k_distance[lists[i].indices[t]], lists[i].distances[t]);
        reach[i] = sum / static_cast<double>(k);
    }
    std::vector<double> lof(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j : lists[i].indices) sum += bounded_ratio(reach[i], reach[j]);
        lof[i] = sum / static_cast<double>(k);
    }
    return lof;
}

ScoreReport score_dataset(const NeighborIndex& index, const DetectorConfig& config, unsigned threads) {
    ScoreReport report;
    report.config = config;
    report.n = index.size();
    report.dim = index.dim();
    report.k = config.resolve_k(report.n);
    switch (config.method) {
        case Method::dtmf: {
            auto r = dtmf2_scores(index, report.k, threads);
            report.scores = std::move(r.scores);
            report.raw = std::move(r.raw);
            break;
        }
        case Method::lof: report.scores = lof_scores(index, report.k, threads); break;
        default: {
            const double q = config.effective_q();
            report.scores.resize(report.n);
            parallel_for(report.n, threads,
                         [&](std::size_t i) { report.scores[i] = dtm_score(index, index.point(i), report.k, q); });
        }
    }
    return report;
}

ScoreReport score_dataset(const Dataset& data, const DetectorConfig& config, unsigned threads) {
    config.resolve_k(data.size());
    return score_dataset(NeighborIndex(data), config, threads);
}

std::vector<std::size_t> ranking_order(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

std::vector<Label> rank_anomalies(std::span<const double> scores, const Budget& budget) {
    std::vector<Label> out(scores.size(), Label::normal);
    if (const auto* top = std::get_if<TopCount>(&budget)) {
        if (top->count > scores.size()) throw InvalidArgument("budget exceeds the number of points");
        const auto order = ranking_order(scores);
        for (std::size_t r = 0; r < top->count; ++r) out[order[r]] = Label::anomaly;
    } else {
        const double t = std::get<ScoreThreshold>(budget).value;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] > t) out[i] = Label::anomaly;
        }
    }
    return out;
}

}  // namespace nnad
