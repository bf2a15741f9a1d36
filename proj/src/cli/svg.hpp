#pragma once

#include <span>
#include <string>

#include "nnad/dataset.hpp"

namespace nnad::cli {

/// 2-D scatter: one circle per point, radius proportional to its score, red for
/// predicted anomalies and blue otherwise. `metadata` is embedded verbatim (escaped)
/// in a <metadata> element. Throws InvalidArgument unless the data is 2-D.
std::string render_scatter(const Dataset& data, std::span<const double> scores, std::span<const Label> predicted,
                           const std::string& title, const std::string& metadata);

std::string xml_escape(const std::string& text);

}  // namespace nnad::cli
