#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nnad {

enum class Label : unsigned char { normal = 0, anomaly = 1 };

/// n points in R^d stored row-major. Row i is the durable identifier of point i.
class Dataset {
public:
    /// Throws InvalidArgument unless n >= 1, d >= 1, values.size() == n*d and all values are finite.
    Dataset(std::vector<double> values, std::size_t dim);

    static Dataset from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return values_.size() / dim_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> point(std::size_t i) const noexcept {
        return {values_.data() + i * dim_, dim_};
    }
    std::span<const double> values() const noexcept { return values_; }

    bool operator==(const Dataset&) const = default;

private:
    std::vector<double> values_;
    std::size_t dim_;
};

class LabeledDataset {
public:
    /// Unlabeled: every point defaults to normal and `has_labels()` is false.
    explicit LabeledDataset(Dataset data);
    LabeledDataset(Dataset data, std::vector<Label> labels);

    const Dataset& data() const noexcept { return data_; }
    const std::vector<Label>& labels() const noexcept { return labels_; }
    bool has_labels() const noexcept { return has_labels_; }

    std::size_t size() const noexcept { return data_.size(); }
    std::size_t anomaly_count() const noexcept;

    bool operator==(const LabeledDataset&) const = default;

private:
    Dataset data_;
    std::vector<Label> labels_;
    bool has_labels_;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace nnad
