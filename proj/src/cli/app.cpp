#include "nnad/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "nnad/csv.hpp"
#include "nnad/detectors.hpp"
#include "nnad/error.hpp"
#include "nnad/eval.hpp"
#include "nnad/generators.hpp"
#include "nnad/parallel.hpp"
#include "nnad/report_io.hpp"
#include "nnad/theory.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;

namespace nnad::cli {

namespace {

constexpr const char* tool_version = NNAD_VERSION;

/// Reads CLI11 configuration from JSON. Nested objects name subcommands, so
/// {"score": {"method": "knn"}} sets `score --method knn`.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        return dump(app, default_also).dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        Json j;
        try {
            j = Json::parse(in);
        } catch (const Json::parse_error& e) {
            throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
        }
        if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
        std::vector<CLI::ConfigItem> items;
        flatten(j, {}, items);
        return items;
    }

private:
    static Json dump(const CLI::App* app, bool default_also) {
        Json j = Json::object();
        for (const CLI::Option* opt : app->get_options()) {
            if (opt->get_lnames().empty() || opt->get_single_name() == "help") continue;
            if (opt->count() > 0) {
                const auto& r = opt->results();
                j[opt->get_single_name()] = r.size() == 1 ? Json(r.front()) : Json(r);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[opt->get_single_name()] = opt->get_default_str();
            }
        }
        for (const CLI::App* sub : app->get_subcommands({})) {
            if (sub->count() > 0) j[sub->get_name()] = dump(sub, default_also);
        }
        return j;
    }

    static std::string scalar(const Json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void flatten(const Json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto nested = parents;
                nested.push_back(key);
                flatten(value, nested, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
    }
};

Json provenance(const std::string& command, Json run) {
    return Json{{"tool", "nnad"}, {"version", tool_version}, {"command", command}, {"run", std::move(run)}};
}

std::vector<std::string> preamble(const Json& prov) {
    return {std::string("nnad ") + tool_version, "config " + prov.dump()};
}

template <class Write>
void emit(const std::string& path, std::ostream& out, Write&& write) {
    if (path.empty() || path == "-") {
        write(out);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot write '" + path + "'");
    write(file);
    file.flush();
    if (!file) throw IoError("failed writing '" + path + "'");
}

std::optional<LabelColumn> parse_label_column(const std::string& text) {
    if (text.empty()) return std::nullopt;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); }))
        return LabelColumn{static_cast<std::size_t>(std::stoull(text))};
    return LabelColumn{text};
}

HeaderMode parse_header(const std::string& text) {
    if (text == "detect") return HeaderMode::detect;
    if (text == "present") return HeaderMode::present;
    if (text == "absent") return HeaderMode::absent;
    throw InvalidArgument("header must be detect, present or absent");
}

ScenarioParams parse_params(const std::vector<std::string>& pairs) {
    ScenarioParams params;
    for (const auto& p : pairs) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw InvalidArgument("parameter '" + p + "' is not key=value");
        const auto value = parse_double(std::string_view(p).substr(eq + 1));
        if (!value) throw InvalidArgument("parameter '" + p + "' has a non-numeric value");
        params[p.substr(0, eq)] = *value;
    }
    return params;
}

Json params_json(const ScenarioParams& params) {
    Json j = Json::object();
    for (const auto& [k, v] : params) j[k] = v;
    return j;
}

WilcoxonMethod parse_wilcoxon_method(const std::string& text) {
    if (text == "auto") return WilcoxonMethod::automatic;
    if (text == "exact") return WilcoxonMethod::exact;
    if (text == "normal") return WilcoxonMethod::normal;
    throw InvalidArgument("wilcoxon method must be auto, exact or normal");
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + '"';
}

std::string detector_name(const DetectorConfig& c) {
    if (c.method == Method::dtm) return "dtm_q" + format_order(c.q);
    return to_string(c.method);
}

unsigned add_threads(CLI::App* sub, unsigned& threads) {
    sub->add_option("--threads", threads, "Worker threads (0 = all hardware threads)")
        ->envname("NNAD_THREADS")
        ->capture_default_str();
    return threads;
}

// ---------------------------------------------------------------- score

struct ScoreOptions {
    std::string input, method = "dtm", q = "2", header = "detect", label_column, output, format = "csv";
    std::size_t k = 0, top = 0;
    double mass = 0.0, threshold = 0.0;
    unsigned threads = 0;
    CLI::Option *k_opt = nullptr, *mass_opt = nullptr, *top_opt = nullptr, *threshold_opt = nullptr;
};

void setup_score(CLI::App& app, ScoreOptions& o) {
    auto* sub = app.add_subcommand("score", "Score every point of a CSV dataset");
    sub->add_option("--input,-i", o.input, "Input CSV")->required();
    sub->add_option("--method", o.method, "knn, kthnn, dtm, dtmf or lof")->capture_default_str();
    sub->add_option("--q", o.q, "DTM order, a real >= 1 or inf (dtm only)")->capture_default_str();
    o.k_opt = sub->add_option("--k", o.k, "Neighbor count");
    o.mass_opt = sub->add_option("--mass,-m", o.mass, "Mass fraction; k = ceil(mass * n) (default 0.03)");
    o.k_opt->excludes(o.mass_opt);
    sub->add_option("--header", o.header, "detect, present or absent")->capture_default_str();
    sub->add_option("--label-column", o.label_column, "Label column to exclude from coordinates (name or index)");
    o.top_opt = sub->add_option("--top", o.top, "Predict the TOP highest scores as anomalies");
    o.threshold_opt = sub->add_option("--threshold", o.threshold, "Predict scores above THRESHOLD as anomalies");
    o.top_opt->excludes(o.threshold_opt);
    sub->add_option("--output,-o", o.output, "Output path (default: standard output)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    add_threads(sub, o.threads);
}

void run_score(const ScoreOptions& o, std::ostream& out) {
    DetectorConfig config;
    config.method = parse_method(o.method);
    config.q = parse_order(o.q);
    if (o.k_opt->count()) config.k = o.k;
    if (o.mass_opt->count()) config.mass = o.mass;
    config.validate();

    const auto data = load_csv(o.input, {parse_header(o.header), parse_label_column(o.label_column)});
    const unsigned threads = resolve_threads(o.threads);
    const auto report = score_dataset(data.data(), config, threads);

    std::optional<std::vector<Label>> predicted;
    Json budget = nullptr;
    if (o.top_opt->count()) {
        predicted = rank_anomalies(report.scores, TopCount{o.top});
        budget = Json{{"top", o.top}};
    } else if (o.threshold_opt->count()) {
        predicted = rank_anomalies(report.scores, ScoreThreshold{o.threshold});
        budget = Json{{"threshold", o.threshold}};
    }
    const Json prov = provenance("score", Json{{"input", o.input},
                                              {"detector", config},
                                              {"k", report.k},
                                              {"effective_q", format_order(config.effective_q())},
                                              {"n", report.n},
                                              {"dim", report.dim},
                                              {"budget", budget},
                                              {"threads", threads}});
    emit(o.output, out, [&](std::ostream& os) {
        if (o.format == "json") {
            Json j = prov;
            j["report"] = score_report_json(report, predicted ? &*predicted : nullptr);
            os << j.dump(2) << '\n';
        } else {
            write_scores_csv(os, report, predicted ? &*predicted : nullptr, preamble(prov));
        }
    });
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
    std::string scores, score_column = "score", labels, label_column = "label", header = "detect", output,
                                     format = "csv";
};

void setup_eval(CLI::App& app, EvalOptions& o) {
    auto* sub = app.add_subcommand("eval", "Compute ROC-AUC and average precision of a score file");
    sub->add_option("--scores,-s", o.scores, "Scores CSV (as written by score)")->required();
    sub->add_option("--score-column", o.score_column, "Column holding the scores")->capture_default_str();
    sub->add_option("--labels,-l", o.labels, "Labeled dataset CSV")->required();
    sub->add_option("--label-column", o.label_column, "Label column (name or index)")->capture_default_str();
    sub->add_option("--header", o.header, "detect, present or absent")->capture_default_str();
    sub->add_option("--output,-o", o.output, "Output path (default: standard output)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void run_eval(const EvalOptions& o, std::ostream& out) {
    const auto scores = read_scores_csv(o.scores, o.score_column);
    const auto labeled = load_csv(o.labels, {parse_header(o.header), parse_label_column(o.label_column)});
    if (!labeled.has_labels()) throw ParseError("missing label column", 0);
    if (labeled.size() != scores.size())
        throw InvalidArgument("score file has " + std::to_string(scores.size()) + " rows but the labels have " +
                              std::to_string(labeled.size()));
    const auto result = evaluate(scores, labeled.labels());
    const Json prov = provenance("eval", Json{{"scores", o.scores},
                                             {"score_column", o.score_column},
                                             {"labels", o.labels},
                                             {"label_column", o.label_column}});
    emit(o.output, out, [&](std::ostream& os) {
        if (o.format == "json") {
            Json j = prov;
            j["result"] = result;
            os << j.dump(2) << '\n';
        } else {
            write_eval_csv(os, result, preamble(prov));
        }
    });
}

// ---------------------------------------------------------------- bounds

struct BoundsOptions {
    TheoryInputs in;
    std::string q = "2", output;
    double eta = 0.0;
    CLI::Option* eta_opt = nullptr;
};

void setup_bounds(CLI::App& app, BoundsOptions& o) {
    auto* sub = app.add_subcommand("bounds", "Evaluate the deviation bounds and separation thresholds");
    sub->add_option("--n", o.in.n, "Sample size")->capture_default_str();
    sub->add_option("--d", o.in.d, "Ambient dimension")->capture_default_str();
    sub->add_option("--delta", o.in.delta, "Failure probability")->capture_default_str();
    sub->add_option("--m,--mass", o.in.m, "Mass parameter")->capture_default_str();
    sub->add_option("--C", o.in.C, "Regularity constant")->capture_default_str();
    sub->add_option("--epsilon", o.in.epsilon, "Contamination proportion")->capture_default_str();
    o.eta_opt = sub->add_option("--eta", o.eta, "Support separation");
    sub->add_option("--buffer", o.in.h, "Buffer h")->capture_default_str();
    sub->add_option("--a0", o.in.a0, "(a,b)-condition constant")->capture_default_str();
    sub->add_option("--b", o.in.b, "Intrinsic dimension")->capture_default_str();
    sub->add_option("--q", o.q, "DTM order, a real >= 1 or inf")->capture_default_str();
    sub->add_option("--output,-o", o.output, "Output path (default: standard output)");
}

void run_bounds(BoundsOptions o, std::ostream& out) {
    o.in.q = parse_order(o.q);
    if (o.eta_opt->count()) o.in.eta = o.eta;
    const auto report = compute_theory_report(o.in);
    Json j = provenance("bounds", Json{{"inputs", o.in}});
    j["report"] = report;
    emit(o.output, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
    std::string scenario, contamination, output;
    std::vector<std::string> params;
    double eta = 0.0;
    std::uint64_t seed = 0;
    CLI::Option* eta_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

void setup_generate(CLI::App& app, GenerateOptions& o) {
    auto* sub = app.add_subcommand("generate", "Write a synthetic labeled dataset as CSV");
    auto* scenario = sub->add_option("--scenario", o.scenario, "ring, local, clustered or shrinking_separation");
    auto* contamination = sub->add_option("--contamination", o.contamination, "JSON file with a contamination spec");
    scenario->excludes(contamination);
    sub->add_option("--param", o.params, "Scenario parameter key=value (repeatable)");
    o.eta_opt = sub->add_option("--eta", o.eta, "Shortcut for --param eta=VALUE");
    o.seed_opt = sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    sub->add_option("--output,-o", o.output, "Output path (default: standard output)");
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError("'" + path + "' is not valid JSON: " + e.what(), 0);
    }
}

void run_generate(const GenerateOptions& o, std::ostream& out) {
    LabeledDataset data(Dataset({0.0}, 1));
    Json run;
    if (!o.contamination.empty()) {
        auto spec = read_json_file(o.contamination).get<ContaminationSpec>();
        if (o.seed_opt->count()) spec.seed = o.seed;
        data = sample_contaminated(spec);
        run = Json{{"contamination", spec}};
    } else if (!o.scenario.empty()) {
        auto overrides = parse_params(o.params);
        if (o.eta_opt->count()) overrides["eta"] = o.eta;
        const auto resolved = scenario_defaults(o.scenario, overrides);
        data = generate_scenario(o.scenario, resolved, o.seed);
        run = Json{{"scenario", o.scenario}, {"params", params_json(resolved)}, {"seed", o.seed}};
    } else {
        throw InvalidArgument("generate needs --scenario or --contamination");
    }
    const Json prov = provenance("generate", run);
    emit(o.output, out, [&](std::ostream& os) { write_csv(os, data, preamble(prov)); });
}

// ---------------------------------------------------------------- demo

struct DemoOptions {
    std::string scenario = "ring", out_dir = "demo_out";
    std::vector<std::string> params;
    double eta = 0.0, mass = default_mass;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    CLI::Option* eta_opt = nullptr;
};

void setup_demo(CLI::App& app, DemoOptions& o) {
    auto* sub = app.add_subcommand("demo", "Run every detector on a synthetic scenario and draw SVG figures");
    sub->add_option("--scenario", o.scenario, "ring, local, clustered or shrinking_separation")->capture_default_str();
    sub->add_option("--param", o.params, "Scenario parameter key=value (repeatable)");
    o.eta_opt = sub->add_option("--eta", o.eta, "Shortcut for --param eta=VALUE");
    sub->add_option("--mass,-m", o.mass, "Mass fraction shared by all detectors")->capture_default_str();
    sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    sub->add_option("--out-dir", o.out_dir, "Directory for the outputs")->capture_default_str();
    add_threads(sub, o.threads);
}

void run_demo(const DemoOptions& o, std::ostream& out) {
    auto overrides = parse_params(o.params);
    if (o.eta_opt->count()) overrides["eta"] = o.eta;
    const auto resolved = scenario_defaults(o.scenario, overrides);
    const auto data = generate_scenario(o.scenario, resolved, o.seed);
    const unsigned threads = resolve_threads(o.threads);

    const std::vector<std::pair<std::string, DetectorConfig>> detectors{
        {"dtm2", {Method::dtm, 2.0, std::nullopt, o.mass}},   {"knn", {Method::knn, 2.0, std::nullopt, o.mass}},
        {"kthnn", {Method::kthnn, 2.0, std::nullopt, o.mass}}, {"dtmf2", {Method::dtmf, 2.0, std::nullopt, o.mass}},
        {"lof", {Method::lof, 2.0, std::nullopt, o.mass}}};
    Json detector_json = Json::object();
    for (const auto& [name, config] : detectors) detector_json[name] = config;
    const Json prov = provenance("demo", Json{{"scenario", o.scenario},
                                             {"params", params_json(resolved)},
                                             {"seed", o.seed},
                                             {"detectors", detector_json},
                                             {"budget", "true anomaly count"},
                                             {"threads", threads}});

    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    if (ec) throw IoError("cannot create '" + o.out_dir + "': " + ec.message());
    const fs::path dir(o.out_dir);
    save_csv(dir / "dataset.csv", data, preamble(prov));

    const NeighborIndex index(data.data());
    std::vector<ScoreReport> reports;
    for (const auto& [name, config] : detectors) reports.push_back(score_dataset(index, config, threads));

    emit((dir / "scores.csv").string(), out, [&](std::ostream& os) {
        for (const auto& line : preamble(prov)) os << "# " << line << '\n';
        os << "index,label";
        for (const auto& d : detectors) os << ',' << d.first;
        os << '\n';
        for (std::size_t i = 0; i < data.size(); ++i) {
            os << i << ',' << (data.labels()[i] == Label::anomaly ? 1 : 0);
            for (const auto& r : reports) os << ',' << format_double(r.scores[i]);
            os << '\n';
        }
    });

    // Distance from the normal points' centroid is the boundary proxy for the blob-shaped scenarios.
    const std::size_t dim = data.data().dim();
    std::vector<double> centroid(dim, 0.0);
    std::size_t normals = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels()[i] == Label::anomaly) continue;
        ++normals;
        for (std::size_t c = 0; c < dim; ++c) centroid[c] += data.data().point(i)[c];
    }
    for (auto& c : centroid) c /= static_cast<double>(std::max<std::size_t>(normals, 1));
    std::vector<double> proximity(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) proximity[i] = std::sqrt(squared_distance(data.data().point(i), centroid));

    const std::size_t budget = data.anomaly_count();
    Json summary = prov;
    summary["n"] = data.size();
    summary["anomalies"] = budget;
    summary["methods"] = Json::object();
    for (std::size_t m = 0; m < detectors.size(); ++m) {
        const auto& name = detectors[m].first;
        const auto& report = reports[m];
        const auto predicted = rank_anomalies(report.scores, TopCount{budget});
        Json entry{{"k", report.k}};
        const auto order = ranking_order(report.scores);
        entry["top"] = std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(budget));
        if (budget > 0 && budget < data.size()) {
            entry["metrics"] = evaluate(report.scores, data.labels());
            entry["boundary"] = boundary_misclassification(data, report, proximity);
        }
        try {
            const auto svg = render_scatter(data.data(), report.scores, predicted,
                                            o.scenario + ": " + name + " (k = " + std::to_string(report.k) + ")",
                                            prov.dump());
            emit((dir / (name + ".svg")).string(), out, [&](std::ostream& os) { os << svg; });
            entry["svg"] = name + ".svg";
        } catch (const InvalidArgument& e) {
            entry["svg"] = nullptr;
            entry["svg_note"] = e.what();
        }
        summary["methods"][name] = entry;

        out << name << ": k=" << report.k;
        if (entry.contains("metrics")) {
            out << " auc=" << format_double(entry["metrics"]["auc"].get<double>())
                << " ap=" << format_double(entry["metrics"]["ap"].get<double>())
                << " misclassified_normals=" << entry["boundary"]["misclassified"].size();
        }
        out << '\n';
    }
    emit((dir / "summary.json").string(), out, [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
    out << "wrote " << o.out_dir << '\n';
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
    std::string spec, output;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    CLI::Option* seed_opt = nullptr;
};

void setup_bench(CLI::App& app, BenchOptions& o) {
    auto* sub = app.add_subcommand("bench", "Evaluate detectors over datasets listed in a JSON spec");
    sub->add_option("--spec", o.spec, "JSON spec with \"datasets\" and \"detectors\" arrays")->required();
    o.seed_opt = sub->add_option("--seed", o.seed, "Seed for generated datasets (overrides the spec)");
    sub->add_option("--output,-o", o.output, "Tidy CSV output path (default: standard output)");
    add_threads(sub, o.threads);
}

LabeledDataset load_bench_dataset(const Json& entry, std::uint64_t seed, const fs::path& base) {
    if (entry.contains("scenario")) {
        ScenarioParams params;
        if (entry.contains("params")) {
            for (const auto& [k, v] : entry.at("params").items()) params[k] = v.get<double>();
        }
        return generate_scenario(entry.at("scenario").get<std::string>(), params, entry.value("seed", seed));
    }
    if (entry.contains("contamination")) {
        auto spec = entry.at("contamination").get<ContaminationSpec>();
        if (!entry.at("contamination").contains("seed")) spec.seed = seed;
        return sample_contaminated(spec);
    }
    if (entry.contains("csv")) {
        fs::path path = entry.at("csv").get<std::string>();
        if (path.is_relative()) path = base / path;
        std::optional<LabelColumn> label;
        if (entry.contains("label_column")) {
            const auto& lc = entry.at("label_column");
            label = lc.is_number() ? LabelColumn{lc.get<std::size_t>()} : LabelColumn{lc.get<std::string>()};
        }
        return load_csv(path, {parse_header(entry.value("header", std::string("detect"))), label});
    }
    throw InvalidArgument("dataset entry needs one of scenario, contamination or csv");
}

void run_bench(const BenchOptions& o, std::ostream& out) {
    const Json spec = read_json_file(o.spec);
    if (!spec.contains("datasets") || !spec.contains("detectors"))
        throw InvalidArgument("bench spec needs \"datasets\" and \"detectors\" arrays");
    const std::uint64_t seed = o.seed_opt->count() ? o.seed : spec.value("seed", std::uint64_t{0});
    const unsigned threads = resolve_threads(o.threads);

    std::vector<std::pair<std::string, DetectorConfig>> detectors;
    for (const auto& d : spec.at("detectors")) {
        auto config = d.get<DetectorConfig>();
        detectors.emplace_back(d.value("name", detector_name(config)), config);
    }
    Json resolved_spec = spec;
    resolved_spec["seed"] = seed;
    const Json prov = provenance("bench", Json{{"spec", o.spec}, {"resolved", resolved_spec}, {"threads", threads}});
    const fs::path base = fs::path(o.spec).parent_path();

    std::ostringstream rows;
    auto row = [&](const std::string& dataset, const std::string& method, const char* metric,
                   std::optional<double> value, const std::string& error, double wall_ms) {
        rows << csv_field(dataset) << ',' << csv_field(method) << ',' << metric << ','
             << (value ? format_double(*value) : "") << ',' << csv_field(error) << ',' << format_double(wall_ms)
             << '\n';
    };

    std::size_t index = 0;
    for (const auto& entry : spec.at("datasets")) {
        const std::string name = entry.value("name", "dataset" + std::to_string(index));
        ++index;
        std::optional<LabeledDataset> data;
        std::string load_error;
        try {
            data = load_bench_dataset(entry, seed, base);
        } catch (const IoError&) {
            throw;
        } catch (const std::exception& e) {
            load_error = e.what();
        }
        for (const auto& [method, config] : detectors) {
            if (!data) {
                row(name, method, "auc", std::nullopt, load_error, 0.0);
                row(name, method, "ap", std::nullopt, load_error, 0.0);
                continue;
            }
            if (!data->has_labels()) {
                row(name, method, "auc", std::nullopt, "labels required", 0.0);
                row(name, method, "ap", std::nullopt, "labels required", 0.0);
                continue;
            }
            const auto start = std::chrono::steady_clock::now();
            try {
                const auto report = score_dataset(data->data(), config, threads);
                const auto result = evaluate(report.scores, data->labels());
                const double ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                row(name, method, "auc", result.auc, "", ms);
                row(name, method, "ap", result.ap, "", ms);
            } catch (const Error& e) {
                const double ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                row(name, method, "auc", std::nullopt, e.what(), ms);
                row(name, method, "ap", std::nullopt, e.what(), ms);
            }
        }
    }
    emit(o.output, out, [&](std::ostream& os) {
        for (const auto& line : preamble(prov)) os << "# " << line << '\n';
        os << "dataset,method,metric,value,error,wall_time_ms\n" << rows.str();
    });
}

// ---------------------------------------------------------------- compare

struct CompareOptions {
    std::string results, a, b, metric = "auc", alternative = "two_sided", method = "auto", output;
};

void setup_compare(CLI::App& app, CompareOptions& o) {
    auto* sub = app.add_subcommand("compare", "Paired Wilcoxon signed-rank test between two methods of a bench run");
    sub->add_option("--results", o.results, "Tidy CSV written by bench")->required();
    sub->add_option("--a", o.a, "First method name")->required();
    sub->add_option("--b", o.b, "Second method name")->required();
    sub->add_option("--metric", o.metric, "auc or ap")->capture_default_str();
    sub->add_option("--alternative", o.alternative, "two_sided, greater (a > b) or less")->capture_default_str();
    sub->add_option("--method", o.method, "auto, exact or normal")->capture_default_str();
    sub->add_option("--output,-o", o.output, "Output path (default: standard output)");
}

void run_compare(const CompareOptions& o, std::ostream& out) {
    std::ifstream in(o.results);
    if (!in) throw IoError("cannot open '" + o.results + "'");
    std::map<std::string, std::map<std::string, double>> table;  // dataset -> method -> value
    std::vector<std::string> dataset_order;
    std::string line;
    bool header = true;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        ++row;
        const auto cells = split_csv_line(line);
        if (cells.size() < 5) throw ParseError("malformed bench row", row);
        if (cells[2] != o.metric || !cells[4].empty()) continue;
        const auto value = parse_double(cells[3]);
        if (!value) throw ParseError("non-numeric value", row);
        const std::string dataset(cells[0]);
        if (!table.count(dataset)) dataset_order.push_back(dataset);
        table[dataset][std::string(cells[1])] = *value;
    }
    std::vector<double> a, b;
    std::vector<std::string> paired;
    for (const auto& d : dataset_order) {
        const auto& m = table[d];
        if (m.count(o.a) && m.count(o.b)) {
            a.push_back(m.at(o.a));
            b.push_back(m.at(o.b));
            paired.push_back(d);
        }
    }
    const auto result = wilcoxon_signed_rank(a, b, parse_alternative(o.alternative), parse_wilcoxon_method(o.method));
    Json j = provenance("compare", Json{{"results", o.results},
                                        {"a", o.a},
                                        {"b", o.b},
                                        {"metric", o.metric},
                                        {"alternative", o.alternative},
                                        {"method", o.method}});
    j["datasets"] = paired;
    j["result"] = result;
    emit(o.output, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

// ---------------------------------------------------------------- calibrate

struct CalibrateOptions {
    std::string reference = "uniform_interval", q = "2", output;
    double lo = 0.0, hi = 1.0, radius = 1.0, mass = default_mass, delta = 0.05;
    std::size_t dim = 2, n = 1000, pilots = 20;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

void setup_calibrate(CLI::App& app, CalibrateOptions& o) {
    auto* sub = app.add_subcommand("calibrate", "Fit the regularity constant C on pilot samples from a reference law");
    sub->add_option("--reference", o.reference, "uniform_interval or uniform_ball")
        ->check(CLI::IsMember({"uniform_interval", "uniform_ball"}))
        ->capture_default_str();
    sub->add_option("--lo", o.lo, "Interval start")->capture_default_str();
    sub->add_option("--hi", o.hi, "Interval end")->capture_default_str();
    sub->add_option("--radius", o.radius, "Ball radius (centered at the origin)")->capture_default_str();
    sub->add_option("--dim", o.dim, "Ball dimension")->capture_default_str();
    sub->add_option("--n", o.n, "Pilot sample size")->capture_default_str();
    sub->add_option("--pilots", o.pilots, "Number of pilot samples")->capture_default_str();
    sub->add_option("--mass,-m", o.mass, "Mass parameter")->capture_default_str();
    sub->add_option("--q", o.q, "DTM order, a real >= 1 or inf")->capture_default_str();
    sub->add_option("--delta", o.delta, "Failure probability")->capture_default_str();
    sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    sub->add_option("--output,-o", o.output, "Output path (default: standard output)");
    add_threads(sub, o.threads);
}

void run_calibrate(const CalibrateOptions& o, std::ostream& out) {
    const double q = parse_order(o.q);
    if (o.pilots < 1) throw InvalidArgument("need at least one pilot sample");
    if (o.n < 2) throw InvalidArgument("pilot sample size must be at least 2");
    const bool interval = o.reference == "uniform_interval";
    const Generator generator(interval ? GeneratorSpec{"uniform_interval", {}, {{"lo", o.lo}, {"hi", o.hi}}}
                                       : GeneratorSpec{"uniform_ball", std::vector<double>(o.dim, 0.0),
                                                       {{"radius", o.radius}}});
    const auto reference = interval ? ReferenceDistribution::uniform_interval(o.lo, o.hi)
                                    : ReferenceDistribution::uniform_ball(std::vector<double>(o.dim, 0.0), o.radius);
    const unsigned threads = resolve_threads(o.threads);
    const DetectorConfig config{Method::dtm, q, std::nullopt, o.mass};

    const Rng root(o.seed);
    std::vector<double> deviations(o.pilots), constants(o.pilots);
    for (std::size_t p = 0; p < o.pilots; ++p) {
        Rng rng = root.split(p);
        std::vector<double> values;
        for (std::size_t i = 0; i < o.n; ++i) generator.draw(rng, values);
        const Dataset data(std::move(values), generator.dim());
        const auto report = score_dataset(data, config, threads);
        std::vector<double> gaps(o.n);
        parallel_for(o.n, threads, [&](std::size_t i) {
            gaps[i] = std::abs(report.scores[i] - population_dtm(reference, data.point(i), o.mass, q));
        });
        deviations[p] = *std::max_element(gaps.begin(), gaps.end());
        constants[p] = calibrate_constant(deviations[p], o.n, o.delta, o.mass);
    }
    const double c_star = *std::max_element(constants.begin(), constants.end());
    Json j = provenance("calibrate", Json{{"reference", o.reference},
                                          {"lo", o.lo},
                                          {"hi", o.hi},
                                          {"radius", o.radius},
                                          {"dim", interval ? 1 : o.dim},
                                          {"n", o.n},
                                          {"pilots", o.pilots},
                                          {"mass", o.mass},
                                          {"q", format_order(q)},
                                          {"delta", o.delta},
                                          {"seed", o.seed},
                                          {"threads", threads}});
    j["C"] = c_star;
    j["dtm_bound_sample"] = dtm_bound_sample(o.n, o.delta, o.mass, c_star);
    j["max_deviation_per_pilot"] = deviations;
    j["C_per_pilot"] = constants;
    emit(o.output, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Nearest-neighbor and distance-to-measure anomaly detection", "nnad");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("nnad ") + tool_version);
    app.set_config("--config", "", "JSON file with option values, nested by subcommand name");
    app.config_formatter(std::make_shared<JsonConfig>());
    app.allow_config_extras(CLI::config_extras_mode::error);

    ScoreOptions score;
    EvalOptions eval;
    BoundsOptions bounds;
    GenerateOptions generate;
    DemoOptions demo;
    BenchOptions bench;
    CompareOptions compare;
    CalibrateOptions calibrate;
    try {
        setup_score(app, score);
        setup_eval(app, eval);
        setup_bounds(app, bounds);
        setup_generate(app, generate);
        setup_demo(app, demo);
        setup_bench(app, bench);
        setup_compare(app, compare);
        setup_calibrate(app, calibrate);
    } catch (const CLI::ConstructionError& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            app.exit(e, out, err);
            return exit_ok;
        }
        if (dynamic_cast<const CLI::FileError*>(&e)) {
            err << "error: " << e.what() << '\n';
            return exit_io;
        }
        err << "error: " << e.what() << '\n' << "run with --help for usage\n";
        return exit_usage;
    }

    try {
        if (app.got_subcommand("score")) run_score(score, out);
        else if (app.got_subcommand("eval")) run_eval(eval, out);
        else if (app.got_subcommand("bounds")) run_bounds(bounds, out);
        else if (app.got_subcommand("generate")) run_generate(generate, out);
        else if (app.got_subcommand("demo")) run_demo(demo, out);
        else if (app.got_subcommand("bench")) run_bench(bench, out);
        else if (app.got_subcommand("compare")) run_compare(compare, out);
        else if (app.got_subcommand("calibrate")) run_calibrate(calibrate, out);
        return exit_ok;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const nnad::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Json::exception& e) {
        err << "error: invalid JSON input: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
}

}  // namespace nnad::cli
