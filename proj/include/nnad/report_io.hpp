#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nnad/detectors.hpp"
#include "nnad/eval.hpp"
#include "nnad/generators.hpp"
#include "nnad/theory.hpp"

namespace nnad {

using Json = nlohmann::ordered_json;

void to_json(Json& j, const DetectorConfig& c);
void from_json(const Json& j, DetectorConfig& c);
void to_json(Json& j, const GeneratorSpec& g);
void from_json(const Json& j, GeneratorSpec& g);
void to_json(Json& j, const ContaminationSpec& s);
void from_json(const Json& j, ContaminationSpec& s);
void to_json(Json& j, const TheoryInputs& in);
void to_json(Json& j, const TheoryReport& r);
void to_json(Json& j, const EvalResult& r);
void to_json(Json& j, const WilcoxonResult& r);
void to_json(Json& j, const BoundarySummary& s);
void to_json(Json& j, const SeparationReport& r);

/// Report with config metadata; `predicted` labels are included when given.
Json score_report_json(const ScoreReport& report, const std::vector<Label>* predicted = nullptr);

/// Columns index,score and, when `predicted` is given, predicted_label, after `# ` preamble lines.
void write_scores_csv(std::ostream& out, const ScoreReport& report, const std::vector<Label>* predicted,
                      const std::vector<std::string>& preamble = {});

/// Reads the `score` column of a scores CSV written by write_scores_csv.
std::vector<double> read_scores_csv(const std::filesystem::path& path, const std::string& column = "score");

/// Columns metric,value (auc, ap, n_pos, n_neg).
void write_eval_csv(std::ostream& out, const EvalResult& result, const std::vector<std::string>& preamble = {});

}  // namespace nnad
