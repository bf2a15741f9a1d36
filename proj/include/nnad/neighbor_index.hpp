#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nnad/dataset.hpp"

namespace nnad {

/// k nearest sample points, ordered by (distance, index).
struct NeighborList {
    std::vector<std::size_t> indices;
    std::vector<double> distances;

    std::size_t size() const noexcept { return indices.size(); }
    bool operator==(const NeighborList&) const = default;
};

enum class SearchStrategy {
    automatic,    ///< sorted_line when d == 1, otherwise kd_tree
    kd_tree,
    sorted_line,  ///< d == 1 only
    brute_force,
};

/**
 * Immutable exact k-NN index over a copy of a dataset's points (Euclidean metric).
 *
 * A query point that coincides with a sample point counts that point at
 * distance 0. Among equidistant candidates the smaller point index wins,
 * so every strategy returns identical lists. Queries are const and may run
 * concurrently.
 */
class NeighborIndex {
public:
    explicit NeighborIndex(const Dataset& data, SearchStrategy strategy = SearchStrategy::automatic);

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return dim_; }
    SearchStrategy strategy() const noexcept { return strategy_; }

    /// Coordinates of sample point i (original order).
    std::span<const double> point(std::size_t i) const noexcept { return {points_.data() + i * dim_, dim_}; }

    /// Throws InvalidArgument unless 1 <= k <= size() and x has dim() finite coordinates.
    NeighborList query(std::span<const double> x, std::size_t k) const;
    NeighborList query_brute_force(std::span<const double> x, std::size_t k) const;

    /// k-th smallest distance from x to the sample: the empirical (k/n)-NN radius.
    double radius(std::span<const double> x, std::size_t k) const;

    /// Sorted coordinates of the k sample points nearest to x, found in O(log n). Requires the sorted_line strategy.
    /// With ties at the k-th distance the chosen points may differ from query(), the distance multiset does not.
    std::span<const double> line_window(double x, std::size_t k) const;

    /// query(point(i), k) for every sample point.
    std::vector<NeighborList> query_all(std::size_t k, unsigned threads = 0) const;

private:
    struct Node {
        std::uint32_t begin, end;  // range in order_
        std::int32_t left = -1, right = -1;
        std::uint32_t split_dim = 0;
        double split_value = 0.0;
    };
    using Candidate = std::pair<double, std::size_t>;  // (squared distance, index)

    void check_query(std::span<const double> x, std::size_t k) const;
    std::int32_t build(std::uint32_t begin, std::uint32_t end, unsigned depth);
    void search(std::int32_t node, std::span<const double> x, std::size_t k, std::vector<Candidate>& heap,
                std::vector<double>& offsets, double lower_bound) const;
    NeighborList tree_query(std::span<const double> x, std::size_t k) const;
    NeighborList line_query(double x, std::size_t k) const;

    std::size_t n_;
    std::size_t dim_;
    SearchStrategy strategy_;
    std::vector<double> points_;        // original order, row-major
    std::vector<std::uint32_t> order_;  // kd-tree / line permutation
    std::vector<double> packed_;        // points in order_ sequence
    std::vector<Node> nodes_;
};

}  // namespace nnad
