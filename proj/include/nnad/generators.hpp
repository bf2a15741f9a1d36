#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nnad/dataset.hpp"
#include "nnad/rng.hpp"

namespace nnad {

/**
 * A sampling distribution identified by `kind`:
 *
 *   uniform_interval  params lo < hi                       (d = 1)
 *   uniform_box       params lo < hi, dim >= 1             (cube [lo,hi]^dim)
 *   uniform_ball      center, params radius > 0
 *   gaussian          center, params sd > 0                (isotropic)
 *   point_mass        center
 *   circle            center (2-D), params radius > 0, jitter >= 0
 *
 * `center` defaults to the origin of dimension `dim` (or 1) when empty.
 */
struct GeneratorSpec {
    std::string kind;
    std::vector<double> center;
    std::map<std::string, double> params;

    bool operator==(const GeneratorSpec&) const = default;
};

/// Huber mixture (1 - epsilon) P0 + epsilon P1.
struct ContaminationSpec {
    GeneratorSpec normal;
    GeneratorSpec anomaly;
    double epsilon = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;

    bool operator==(const ContaminationSpec&) const = default;
};

/// Validated, ready-to-draw form of a GeneratorSpec.
class Generator {
public:
    /// Throws InvalidArgument for unknown kinds or invalid parameters.
    explicit Generator(GeneratorSpec spec);

    std::size_t dim() const noexcept { return dim_; }
    const GeneratorSpec& spec() const noexcept { return spec_; }

    /// Appends one draw to `out`.
    void draw(Rng& rng, std::vector<double>& out) const;

private:
    double param(const char* name) const;

    GeneratorSpec spec_;
    std::size_t dim_ = 1;
};

/// Each point comes from P1 with probability epsilon (one uniform per point), else from P0.
/// Labels record the component actually drawn.
LabeledDataset sample_contaminated(const ContaminationSpec& spec);

using ScenarioParams = std::map<std::string, double>;

/// Names accepted by generate_scenario.
const std::vector<std::string>& scenario_names();

/// Resolved parameters for `name`: documented defaults overridden by `overrides`.
/// Throws InvalidArgument on unknown scenario, unknown keys or invalid values.
ScenarioParams scenario_defaults(const std::string& name, const ScenarioParams& overrides = {});

/**
 * Synthetic 2-D scenarios. Normal rows come first, anomalies last.
 * Normals and anomalies are drawn from independent sub-streams of `seed`,
 * so changing only anomaly parameters leaves the normal points unchanged.
 *
 *   ring                   normals on a circle, anomalies at its center
 *   local                  dense and sparse Gaussian clusters, anomalies just outside the dense one
 *   clustered              Gaussian blob plus a tight anomaly cluster centered at distance eta
 *   shrinking_separation   standard normal blob plus a 5-point cluster centered at distance eta
 */
LabeledDataset generate_scenario(const std::string& name, const ScenarioParams& params, std::uint64_t seed);

}  // namespace nnad
