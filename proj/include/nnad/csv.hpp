#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nnad/dataset.hpp"

namespace nnad {

enum class HeaderMode { detect, present, absent };

/// Column that carries 0/1 labels, by header name or by 0-based index.
using LabelColumn = std::variant<std::string, std::size_t>;

struct CsvOptions {
    HeaderMode header = HeaderMode::detect;
    std::optional<LabelColumn> label_column;
};

/**
 * Comma-separated text, UTF-8, '.' decimal point. Lines starting with '#'
 * and blank lines are skipped. With HeaderMode::detect the first line is a
 * header iff one of its cells is not a number. Label value 1 marks an
 * anomaly, 0 a normal point.
 */
LabeledDataset read_csv(std::istream& in, const CsvOptions& options = {});
LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes columns x0..x{d-1} plus a trailing `label` column when the dataset is labeled.
/// Each entry of `preamble` is emitted first as a `# ` comment line.
void write_csv(std::ostream& out, const LabeledDataset& data, const std::vector<std::string>& preamble = {});
void save_csv(const std::filesystem::path& path, const LabeledDataset& data,
              const std::vector<std::string>& preamble = {});

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);

std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace nnad
