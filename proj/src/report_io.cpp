#include "nnad/report_io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "nnad/csv.hpp"
#include "nnad/error.hpp"

namespace nnad {

namespace {

Json optional_number(const std::optional<double>& v) {
    if (!v) return nullptr;
    if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
    return *v;
}

double number_or_inf(const Json& j) {
    if (j.is_string()) return parse_order(j.get<std::string>());
    return j.get<double>();
}

}  // namespace

void to_json(Json& j, const DetectorConfig& c) {
    j = Json{{"method", to_string(c.method)}};
    if (c.method == Method::dtm) j["q"] = format_order(c.q);
    j["k"] = c.k ? Json(*c.k) : Json(nullptr);
    j["mass"] = c.mass ? Json(*c.mass) : Json(nullptr);
}

void from_json(const Json& j, DetectorConfig& c) {
    c = DetectorConfig{};
    c.method = parse_method(j.at("method").get<std::string>());
    if (j.contains("q") && !j.at("q").is_null()) c.q = number_or_inf(j.at("q"));
    if (j.contains("k") && !j.at("k").is_null()) c.k = j.at("k").get<std::size_t>();
    if (j.contains("mass") && !j.at("mass").is_null()) c.mass = j.at("mass").get<double>();
    c.validate();
}

void to_json(Json& j, const GeneratorSpec& g) {
    j = Json{{"kind", g.kind}};
    if (!g.center.empty()) j["center"] = g.center;
    j["params"] = Json::object();
    for (const auto& [k, v] : g.params) j["params"][k] = v;
}

void from_json(const Json& j, GeneratorSpec& g) {
    g = GeneratorSpec{};
    g.kind = j.at("kind").get<std::string>();
    if (j.contains("center")) g.center = j.at("center").get<std::vector<double>>();
    if (j.contains("params")) {
        for (const auto& [k, v] : j.at("params").items()) g.params[k] = v.get<double>();
    }
}

void to_json(Json& j, const ContaminationSpec& s) {
    j = Json{{"normal", s.normal}, {"anomaly", s.anomaly}, {"epsilon", s.epsilon}, {"n", s.n}, {"seed", s.seed}};
}

void from_json(const Json& j, ContaminationSpec& s) {
    s.normal = j.at("normal").get<GeneratorSpec>();
    s.anomaly = j.at("anomaly").get<GeneratorSpec>();
    s.epsilon = j.at("epsilon").get<double>();
    s.n = j.at("n").get<std::size_t>();
    s.seed = j.value("seed", std::uint64_t{0});
}

void to_json(Json& j, const TheoryInputs& in) {
    j = Json{{"n", in.n},   {"d", in.d},   {"delta", in.delta}, {"m", in.m},
             {"C", in.C},   {"epsilon", in.epsilon}, {"eta", optional_number(in.eta)},
             {"h", in.h},   {"a0", in.a0}, {"b", in.b},         {"q", format_order(in.q)}};
}

void to_json(Json& j, const TheoryReport& r) {
    j = Json{{"inputs", r.inputs}, {"k", r.k}};
    Json quantities = Json::object();
    for (const auto& q : r.quantities) {
        if (q.value)
            quantities[q.name] = optional_number(q.value);
        else
            quantities[q.name] = Json{{"value", nullptr}, {"reason", q.reason}};
    }
    j["quantities"] = std::move(quantities);
}

void to_json(Json& j, const EvalResult& r) {
    j = Json{{"auc", r.auc}, {"ap", r.ap}, {"n_pos", r.n_pos}, {"n_neg", r.n_neg}};
}

void to_json(Json& j, const WilcoxonResult& r) {
    j = Json{{"statistic", r.statistic}, {"p_value", r.p_value}, {"n_used", r.n_used}, {"exact", r.exact}};
}

void to_json(Json& j, const BoundarySummary& s) {
    j = Json{{"budget", s.budget},
             {"misclassified_count", s.misclassified.size()},
             {"misclassified", s.misclassified},
             {"correct_count", s.correct_count},
             {"mean_proximity_misclassified", optional_number(s.mean_proximity_misclassified)},
             {"mean_proximity_correct", optional_number(s.mean_proximity_correct)},
             {"rank_correlation", optional_number(s.rank_correlation)}};
}

void to_json(Json& j, const SeparationReport& r) {
    j = Json{{"eta", optional_number(r.eta)},
             {"g0", optional_number(r.g0)},
             {"zone_depth", optional_number(r.zone_depth)},
             {"zone_count", r.zone_count},
             {"support_count", r.support_count},
             {"anomaly_count", r.anomaly_count},
             {"zone_sup", optional_number(r.zone_sup)},
             {"support_sup", optional_number(r.support_sup)},
             {"anomaly_inf", optional_number(r.anomaly_inf)},
             {"holds", r.holds},
             {"full_support_holds", r.full_support_holds},
             {"note", r.note}};
}

Json score_report_json(const ScoreReport& report, const std::vector<Label>* predicted) {
    Json j{{"config", report.config}, {"n", report.n}, {"dim", report.dim}, {"k", report.k}};
    j["scores"] = report.scores;
    if (!report.raw.empty()) j["raw"] = report.raw;
    if (predicted) {
        Json labels = Json::array();
        for (auto l : *predicted) labels.push_back(l == Label::anomaly ? 1 : 0);
        j["predicted_label"] = std::move(labels);
    }
    return j;
}

void write_scores_csv(std::ostream& out, const ScoreReport& report, const std::vector<Label>* predicted,
                      const std::vector<std::string>& preamble) {
    for (const auto& p : preamble) out << "# " << p << '\n';
    out << (predicted ? "index,score,predicted_label\n" : "index,score\n");
    for (std::size_t i = 0; i < report.scores.size(); ++i) {
        out << i << ',' << format_double(report.scores[i]);
        if (predicted) out << ',' << ((*predicted)[i] == Label::anomaly ? 1 : 0);
        out << '\n';
    }
}

std::vector<double> read_scores_csv(const std::filesystem::path& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string line;
    std::optional<std::size_t> col;
    std::vector<double> scores;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto cells = split_csv_line(line);
        if (!col) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (cells[c] == column) col = c;
            }
            if (!col) throw ParseError("scores file has no '" + column + "' column", 0);
            continue;
        }
        ++row;
        if (*col >= cells.size()) throw ParseError("malformed row in scores file", row);
        const auto v = parse_double(cells[*col]);
        if (!v) throw ParseError("non-numeric score '" + std::string(cells[*col]) + "'", row);
        scores.push_back(*v);
    }
    if (scores.empty()) throw ParseError("scores file has no rows", 0);
    return scores;
}

void write_eval_csv(std::ostream& out, const EvalResult& result, const std::vector<std::string>& preamble) {
    for (const auto& p : preamble) out << "# " << p << '\n';
    out << "metric,value\n";
    out << "auc," << format_double(result.auc) << '\n';
    out << "ap," << format_double(result.ap) << '\n';
    out << "n_pos," << result.n_pos << '\n';
    out << "n_neg," << result.n_neg << '\n';
}

}  // namespace nnad
