#include "nnad/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "nnad/error.hpp"

namespace nnad {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

bool skippable(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

}  // namespace

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_double(std::string_view text) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

LabeledDataset read_csv(std::istream& in, const CsvOptions& options) {
    std::vector<std::string> lines;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (skippable(line)) continue;
        lines.push_back(line);
        line_numbers.push_back(line_no);
    }
    if (lines.empty()) throw ParseError("empty CSV input", 0);

    const auto first = split_csv_line(lines.front());
    bool has_header = options.header == HeaderMode::present;
    if (options.header == HeaderMode::detect) {
        for (auto cell : first) {
            if (!parse_double(cell)) {
                has_header = true;
                break;
            }
        }
    }
    const std::size_t columns = first.size();

    std::optional<std::size_t> label_index;
    if (options.label_column) {
        if (const auto* name = std::get_if<std::string>(&*options.label_column)) {
            if (!has_header) throw ParseError("label column '" + *name + "' requested but the CSV has no header", 0);
            for (std::size_t c = 0; c < first.size(); ++c) {
                if (first[c] == *name) label_index = c;
            }
            if (!label_index) throw ParseError("missing label column '" + *name + "'", 0);
        } else {
            label_index = std::get<std::size_t>(*options.label_column);
            if (*label_index >= columns)
                throw ParseError("missing label column index " + std::to_string(*label_index), 0);
        }
    }
    const std::size_t dim = columns - (label_index ? 1 : 0);
    if (dim == 0) throw ParseError("CSV has no feature columns", 0);

    std::vector<double> values;
    std::vector<Label> labels;
    const std::size_t begin = has_header ? 1 : 0;
    if (begin == lines.size()) throw ParseError("CSV has a header but no data rows", 0);
    values.reserve((lines.size() - begin) * dim);
    for (std::size_t r = begin; r < lines.size(); ++r) {
        const std::size_t row = r - begin + 1;
        const std::string where = " (line " + std::to_string(line_numbers[r]) + ")";
        const auto cells = split_csv_line(lines[r]);
        if (cells.size() != columns)
            throw ParseError("malformed row: expected " + std::to_string(columns) + " cells, found " +
                                 std::to_string(cells.size()) + where,
                             row);
        for (std::size_t c = 0; c < columns; ++c) {
            const auto v = parse_double(cells[c]);
            if (!v || !std::isfinite(*v))
                throw ParseError("non-numeric cell '" + std::string(cells[c]) + "' in column " +
                                     std::to_string(c + 1) + where,
                                 row);
            if (label_index && c == *label_index) {
                if (*v == 0.0)
                    labels.push_back(Label::normal);
                else if (*v == 1.0)
                    labels.push_back(Label::anomaly);
                else
                    throw ParseError("label must be 0 or 1, found '" + std::string(cells[c]) + "'" + where, row);
            } else {
                values.push_back(*v);
            }
        }
    }
    Dataset data(std::move(values), dim);
    if (label_index) return LabeledDataset(std::move(data), std::move(labels));
    return LabeledDataset(std::move(data));
}

LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_csv(in, options);
}

void write_csv(std::ostream& out, const LabeledDataset& data, const std::vector<std::string>& preamble) {
    for (const auto& p : preamble) out << "# " << p << '\n';
    const auto& ds = data.data();
    for (std::size_t j = 0; j < ds.dim(); ++j) out << (j ? "," : "") << 'x' << j;
    if (data.has_labels()) out << ",label";
    out << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto p = ds.point(i);
        for (std::size_t j = 0; j < p.size(); ++j) out << (j ? "," : "") << format_double(p[j]);
        if (data.has_labels()) out << ',' << (data.labels()[i] == Label::anomaly ? 1 : 0);
        out << '\n';
    }
}

void save_csv(const std::filesystem::path& path, const LabeledDataset& data, const std::vector<std::string>& preamble) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_csv(out, data, preamble);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace nnad
