#include "nnad/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "nnad/error.hpp"

namespace nnad {

Dataset::Dataset(std::vector<double> values, std::size_t dim) : values_(std::move(values)), dim_(dim) {
    if (dim_ == 0) throw InvalidArgument("dataset dimension must be >= 1");
    if (values_.empty()) throw InvalidArgument("dataset must contain at least one point");
    if (values_.size() % dim_ != 0)
        throw InvalidArgument("coordinate count is not a multiple of the dimension");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw InvalidArgument("non-finite coordinate in point " + std::to_string(i / dim_));
    }
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InvalidArgument("dataset must contain at least one point");
    const std::size_t d = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * d);
    for (const auto& r : rows) {
        if (r.size() != d) throw InvalidArgument("rows have inconsistent dimension");
        values.insert(values.end(), r.begin(), r.end());
    }
    return Dataset(std::move(values), d);
}

LabeledDataset::LabeledDataset(Dataset data)
    : data_(std::move(data)), labels_(data_.size(), Label::normal), has_labels_(false) {}

LabeledDataset::LabeledDataset(Dataset data, std::vector<Label> labels)
    : data_(std::move(data)), labels_(std::move(labels)), has_labels_(true) {
    if (labels_.size() != data_.size()) throw InvalidArgument("label count does not match point count");
}

std::size_t LabeledDataset::anomaly_count() const noexcept {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), Label::anomaly));
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double t = a[j] - b[j];
        s += t * t;
    }
    return s;
}

}  // namespace nnad
