#include "nnad/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "nnad/error.hpp"

namespace nnad {

namespace {

const std::map<std::string, std::set<std::string>>& generator_kinds() {
    static const std::map<std::string, std::set<std::string>> kinds = {
        {"uniform_interval", {"lo", "hi"}},
        {"uniform_box", {"lo", "hi", "dim"}},
        {"uniform_ball", {"radius", "dim"}},
        {"gaussian", {"sd", "dim"}},
        {"point_mass", {"dim"}},
        {"circle", {"radius", "jitter"}},
    };
    return kinds;
}

std::size_t count_param(const ScenarioParams& p, const char* name, bool allow_zero = false) {
    const double v = p.at(name);
    if (!(v == std::floor(v)) || v < (allow_zero ? 0.0 : 1.0))
        throw InvalidArgument(std::string("scenario count '") + name + "' must be a " +
                              (allow_zero ? "non-negative" : "positive") + " integer");
    return static_cast<std::size_t>(v);
}

double positive_param(const ScenarioParams& p, const char* name) {
    const double v = p.at(name);
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string("scenario parameter '") + name + "' must be positive");
    return v;
}

double nonnegative_param(const ScenarioParams& p, const char* name) {
    const double v = p.at(name);
    if (!(v >= 0.0) || !std::isfinite(v))
        throw InvalidArgument(std::string("scenario parameter '") + name + "' must be non-negative");
    return v;
}

void gaussian_cluster(Rng& rng, std::size_t count, double cx, double cy, double sd, std::vector<double>& out) {
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(cx + sd * rng.normal());
        out.push_back(cy + sd * rng.normal());
    }
}

}  // namespace

Generator::Generator(GeneratorSpec spec) : spec_(std::move(spec)) {
    const auto it = generator_kinds().find(spec_.kind);
    if (it == generator_kinds().end()) throw InvalidArgument("unknown generator '" + spec_.kind + "'");
    for (const auto& [key, value] : spec_.params) {
        if (!it->second.contains(key))
            throw InvalidArgument("generator '" + spec_.kind + "' has no parameter '" + key + "'");
        if (!std::isfinite(value)) throw InvalidArgument("generator parameter '" + key + "' must be finite");
    }
    for (double c : spec_.center) {
        if (!std::isfinite(c)) throw InvalidArgument("generator center must be finite");
    }

    const auto& k = spec_.kind;
    if (spec_.params.contains("dim")) {
        const double d = spec_.params.at("dim");
        if (d < 1 || d != std::floor(d)) throw InvalidArgument("generator 'dim' must be a positive integer");
        if (!spec_.center.empty() && spec_.center.size() != static_cast<std::size_t>(d))
            throw InvalidArgument("generator 'dim' disagrees with the center's dimension");
    }
    if (k == "uniform_interval") {
        if (!spec_.center.empty()) throw InvalidArgument("uniform_interval takes lo/hi, not a center");
        if (!(param("hi") > param("lo"))) throw InvalidArgument("uniform_interval requires lo < hi");
        dim_ = 1;
    } else if (k == "uniform_box") {
        if (!(param("hi") > param("lo"))) throw InvalidArgument("uniform_box requires lo < hi");
        dim_ = spec_.params.contains("dim") ? static_cast<std::size_t>(param("dim")) : 1;
    } else {
        dim_ = !spec_.center.empty()                ? spec_.center.size()
               : spec_.params.contains("dim")       ? static_cast<std::size_t>(param("dim"))
               : k == "circle"                      ? 2
                                                    : 1;
        if (spec_.center.empty()) spec_.center.assign(dim_, 0.0);
        if (k == "uniform_ball" && !(param("radius") > 0.0)) throw InvalidArgument("uniform_ball radius must be positive");
        if (k == "gaussian" && !(param("sd") > 0.0)) throw InvalidArgument("gaussian sd must be positive");
        if (k == "circle") {
            if (dim_ != 2) throw InvalidArgument("circle generator is 2-D");
            if (!(param("radius") > 0.0)) throw InvalidArgument("circle radius must be positive");
            const double jitter = spec_.params.contains("jitter") ? param("jitter") : 0.0;
            if (jitter < 0.0) throw InvalidArgument("circle jitter must be non-negative");
        }
    }
}

double Generator::param(const char* name) const {
    const auto it = spec_.params.find(name);
    if (it == spec_.params.end())
        throw InvalidArgument("generator '" + spec_.kind + "' requires parameter '" + name + "'");
    return it->second;
}

void Generator::draw(Rng& rng, std::vector<double>& out) const {
    const auto& k = spec_.kind;
    if (k == "uniform_interval") {
        out.push_back(rng.uniform(param("lo"), param("hi")));
    } else if (k == "uniform_box") {
        const double lo = param("lo"), hi = param("hi");
        for (std::size_t j = 0; j < dim_; ++j) out.push_back(rng.uniform(lo, hi));
    } else if (k == "uniform_ball") {
        std::vector<double> dir(dim_);
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& v : dir) {
                v = rng.normal();
                norm2 += v * v;
            }
        } while (norm2 == 0.0);
        const double r = param("radius") * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim_));
        const double scale = r / std::sqrt(norm2);
        for (std::size_t j = 0; j < dim_; ++j) out.push_back(spec_.center[j] + scale * dir[j]);
    } else if (k == "gaussian") {
        const double sd = param("sd");
        for (std::size_t j = 0; j < dim_; ++j) out.push_back(spec_.center[j] + sd * rng.normal());
    } else if (k == "point_mass") {
        out.insert(out.end(), spec_.center.begin(), spec_.center.end());
    } else {  // circle
        const double jitter = spec_.params.contains("jitter") ? param("jitter") : 0.0;
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double r = param("radius") + (jitter > 0.0 ? rng.uniform(-jitter, jitter) : 0.0);
        out.push_back(spec_.center[0] + r * std::cos(angle));
        out.push_back(spec_.center[1] + r * std::sin(angle));
    }
}

LabeledDataset sample_contaminated(const ContaminationSpec& spec) {
    if (!(spec.epsilon >= 0.0 && spec.epsilon < 1.0)) throw InvalidArgument("epsilon must lie in [0, 1)");
    if (spec.n < 1) throw InvalidArgument("sample count must be >= 1");
    const Generator normal(spec.normal);
    const Generator anomaly(spec.anomaly);
    if (normal.dim() != anomaly.dim()) throw InvalidArgument("normal and anomaly generators differ in dimension");

    Rng rng(spec.seed);
    std::vector<double> values;
    values.reserve(spec.n * normal.dim());
    std::vector<Label> labels;
    labels.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        if (rng.uniform() < spec.epsilon) {
            anomaly.draw(rng, values);
            labels.push_back(Label::anomaly);
        } else {
            normal.draw(rng, values);
            labels.push_back(Label::normal);
        }
    }
    return LabeledDataset(Dataset(std::move(values), normal.dim()), std::move(labels));
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {"ring", "local", "clustered", "shrinking_separation"};
    return names;
}

// Defaults were chosen to resemble the reference figures; they are not part of any published setup.
ScenarioParams scenario_defaults(const std::string& name, const ScenarioParams& overrides) {
    static const std::map<std::string, ScenarioParams> defaults = {
        {"ring", {{"n_normal", 100}, {"n_anomaly", 2}, {"radius", 1.0}, {"jitter", 0.0}, {"regular", 0}}},
        {"local",
         {{"n_dense", 100}, {"dense_sd", 0.05}, {"n_sparse", 100}, {"sparse_sd", 1.0}, {"sparse_offset", 4.0},
          {"n_anomaly", 2}, {"anomaly_offset", 0.5}}},
        {"clustered",
         {{"n_normal", 500}, {"normal_sd", 1.0}, {"n_anomaly", 12}, {"anomaly_sd", 0.05}, {"eta", 7.0}}},
        {"shrinking_separation",
         {{"n_normal", 200}, {"n_anomaly", 5}, {"anomaly_sd", 0.1}, {"eta", 4.0}}},
    };
    const auto it = defaults.find(name);
    if (it == defaults.end()) throw InvalidArgument("unknown scenario '" + name + "'");
    ScenarioParams p = it->second;
    for (const auto& [key, value] : overrides) {
        if (!p.contains(key)) throw InvalidArgument("scenario '" + name + "' has no parameter '" + key + "'");
        if (!std::isfinite(value)) throw InvalidArgument("scenario parameter '" + key + "' must be finite");
        p[key] = value;
    }
    return p;
}

LabeledDataset generate_scenario(const std::string& name, const ScenarioParams& params, std::uint64_t seed) {
    const ScenarioParams p = scenario_defaults(name, params);
    const Rng root(seed);
    Rng normal_rng = root.split(0);
    Rng anomaly_rng = root.split(1);
    std::vector<double> values;
    std::size_t n_normal = 0;
    std::size_t n_anomaly = 0;

    if (name == "ring") {
        n_normal = count_param(p, "n_normal");
        n_anomaly = count_param(p, "n_anomaly");
        const double radius = positive_param(p, "radius");
        const double jitter = nonnegative_param(p, "jitter");
        const bool regular = p.at("regular") != 0.0;
        for (std::size_t i = 0; i < n_normal; ++i) {
            const double angle = regular ? 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_normal)
                                         : normal_rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double r = radius + (jitter > 0.0 ? normal_rng.uniform(-jitter, jitter) : 0.0);
            values.push_back(r * std::cos(angle));
            values.push_back(r * std::sin(angle));
        }
        values.insert(values.end(), 2 * n_anomaly, 0.0);
    } else if (name == "local") {
        const std::size_t n_dense = count_param(p, "n_dense");
        const std::size_t n_sparse = count_param(p, "n_sparse");
        n_normal = n_dense + n_sparse;
        n_anomaly = count_param(p, "n_anomaly");
        gaussian_cluster(normal_rng, n_dense, 0.0, 0.0, positive_param(p, "dense_sd"), values);
        gaussian_cluster(normal_rng, n_sparse, p.at("sparse_offset"), 0.0, positive_param(p, "sparse_sd"), values);
        // Anomalies sit on a circle around the dense cluster, spread evenly on its far side.
        const double offset = positive_param(p, "anomaly_offset");
        for (std::size_t i = 0; i < n_anomaly; ++i) {
            const double angle = std::numbers::pi * (0.5 + static_cast<double>(i + 1) / static_cast<double>(n_anomaly + 1));
            values.push_back(offset * std::cos(angle));
            values.push_back(offset * std::sin(angle));
        }
    } else if (name == "clustered") {
        n_normal = count_param(p, "n_normal");
        n_anomaly = count_param(p, "n_anomaly");
        gaussian_cluster(normal_rng, n_normal, 0.0, 0.0, positive_param(p, "normal_sd"), values);
        gaussian_cluster(anomaly_rng, n_anomaly, nonnegative_param(p, "eta"), 0.0, positive_param(p, "anomaly_sd"),
                         values);
    } else {  // shrinking_separation
        n_normal = count_param(p, "n_normal");
        n_anomaly = count_param(p, "n_anomaly");
        gaussian_cluster(normal_rng, n_normal, 0.0, 0.0, 1.0, values);
        gaussian_cluster(anomaly_rng, n_anomaly, nonnegative_param(p, "eta"), 0.0, positive_param(p, "anomaly_sd"),
                         values);
    }

    std::vector<Label> labels(n_normal, Label::normal);
    labels.resize(n_normal + n_anomaly, Label::anomaly);
    return LabeledDataset(Dataset(std::move(values), 2), std::move(labels));
}

}  // namespace nnad
