#include "nnad/neighbor_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nnad/error.hpp"
#include "nnad/parallel.hpp"

namespace nnad {

namespace {

constexpr std::uint32_t leaf_size = 12;

// Slack on the pruning test so that rounding in the incremental lower bound
// can never discard a candidate tied with the current k-th distance.
constexpr double prune_slack = 1.0 + 1e-10;

NeighborList to_list(std::span<const std::pair<double, std::size_t>> sorted) {
    NeighborList out;
    out.indices.reserve(sorted.size());
    out.distances.reserve(sorted.size());
    for (const auto& [d2, idx] : sorted) {
        out.indices.push_back(idx);
        out.distances.push_back(std::sqrt(d2));
    }
    return out;
}

}  // namespace

NeighborIndex::NeighborIndex(const Dataset& data, SearchStrategy strategy)
    : n_(data.size()), dim_(data.dim()), strategy_(strategy), points_(data.values().begin(), data.values().end()) {
    if (n_ > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("dataset too large for the index");
    if (strategy_ == SearchStrategy::automatic)
        strategy_ = dim_ == 1 ? SearchStrategy::sorted_line : SearchStrategy::kd_tree;
    if (strategy_ == SearchStrategy::sorted_line && dim_ != 1)
        throw InvalidArgument("sorted_line search requires one-dimensional data");

    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0u);
    if (strategy_ == SearchStrategy::sorted_line) {
        std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) {
            return points_[a] < points_[b] || (points_[a] == points_[b] && a < b);
        });
    } else if (strategy_ == SearchStrategy::kd_tree) {
        nodes_.reserve(2 * (n_ / leaf_size + 1));
        build(0, static_cast<std::uint32_t>(n_), 0);
    }
    if (strategy_ != SearchStrategy::brute_force) {
        packed_.resize(points_.size());
        for (std::size_t i = 0; i < n_; ++i) {
            std::copy_n(points_.begin() + static_cast<std::ptrdiff_t>(order_[i] * dim_), dim_,
                        packed_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
        }
    }
}

std::int32_t NeighborIndex::build(std::uint32_t begin, std::uint32_t end, unsigned depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size) return id;

    // Split on the dimension of widest spread, at the median.
    std::uint32_t best_dim = 0;
    double best_spread = -1.0;
    for (std::uint32_t j = 0; j < dim_; ++j) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::uint32_t i = begin; i < end; ++i) {
            const double v = points_[order_[i] * dim_ + j];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            best_dim = j;
        }
    }
    if (best_spread <= 0.0) return id;  // all points identical: keep as one leaf

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         return points_[a * dim_ + best_dim] < points_[b * dim_ + best_dim];
                     });
    const double split = points_[order_[mid] * dim_ + best_dim];
    nodes_[id].split_dim = best_dim;
    nodes_[id].split_value = split;
    const auto left = build(begin, mid, depth + 1);
    const auto right = build(mid, end, depth + 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void NeighborIndex::check_query(std::span<const double> x, std::size_t k) const {
    if (x.size() != dim_)
        throw InvalidArgument("query has dimension " + std::to_string(x.size()) + ", index has " + std::to_string(dim_));
    for (double v : x) {
        if (!std::isfinite(v)) throw InvalidArgument("query point must be finite");
    }
    if (k < 1 || k > n_)
        throw InvalidArgument("k = " + std::to_string(k) + " out of range [1, " + std::to_string(n_) + "]");
}

NeighborList NeighborIndex::query(std::span<const double> x, std::size_t k) const {
    check_query(x, k);
    switch (strategy_) {
        case SearchStrategy::kd_tree: return tree_query(x, k);
        case SearchStrategy::sorted_line: return line_query(x[0], k);
        default: return query_brute_force(x, k);
    }
}

NeighborList NeighborIndex::query_brute_force(std::span<const double> x, std::size_t k) const {
    check_query(x, k);
    std::vector<Candidate> all(n_);
    for (std::size_t i = 0; i < n_; ++i) all[i] = {squared_distance(x, point(i)), i};
    std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k - 1), all.end());
    all.resize(k);
    std::sort(all.begin(), all.end());
    return to_list(all);
}

double NeighborIndex::radius(std::span<const double> x, std::size_t k) const {
    if (strategy_ == SearchStrategy::sorted_line) {
        check_query(x, k);
        const auto w = line_window(x[0], k);
        return std::max(x[0] - w.front(), w.back() - x[0]);
    }
    return query(x, k).distances.back();
}

std::span<const double> NeighborIndex::line_window(double x, std::size_t k) const {
    if (strategy_ != SearchStrategy::sorted_line) throw InvalidArgument("line_window requires the sorted_line strategy");
    check_query(std::span<const double>(&x, 1), k);
    // Windows [l, l + k) that contain the insertion point; take the first l where sliding right stops helping.
    const auto pos = static_cast<std::size_t>(std::lower_bound(packed_.begin(), packed_.end(), x) - packed_.begin());
    std::size_t lo = pos >= k ? pos - k : 0;
    std::size_t hi = std::min(pos, n_ - k);
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (x - packed_[mid] <= packed_[mid + k] - x)
            hi = mid;
        else
            lo = mid + 1;
    }
    return {packed_.data() + lo, k};
}

std::vector<NeighborList> NeighborIndex::query_all(std::size_t k, unsigned threads) const {
    std::vector<NeighborList> out(n_);
    if (strategy_ == SearchStrategy::brute_force) {
        parallel_for(n_, threads, [&](std::size_t i) { out[i] = query(point(i), k); });
        return out;
    }
    // Visit queries in index order (tree leaves / sorted line) so consecutive searches share cached nodes.
    parallel_for(n_, threads, [&](std::size_t t) {
        out[order_[t]] = query({packed_.data() + t * dim_, dim_}, k);
    });
    return out;
}

NeighborList NeighborIndex::tree_query(std::span<const double> x, std::size_t k) const {
    std::vector<Candidate> heap;
    heap.reserve(k + 1);
    std::vector<double> offsets(dim_, 0.0);
    search(0, x, k, heap, offsets, 0.0);
    std::sort_heap(heap.begin(), heap.end());
    return to_list(heap);
}

void NeighborIndex::search(std::int32_t node_id, std::span<const double> x, std::size_t k,
                           std::vector<Candidate>& heap, std::vector<double>& offsets, double lower_bound) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.left < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const Candidate c{squared_distance(x, {packed_.data() + std::size_t{i} * dim_, dim_}), order_[i]};
            if (heap.size() < k) {
                heap.push_back(c);
                std::push_heap(heap.begin(), heap.end());
            } else if (c < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = c;
                std::push_heap(heap.begin(), heap.end());
            }
        }
        return;
    }
    const double diff = x[node.split_dim] - node.split_value;
    const auto near = diff < 0.0 ? node.left : node.right;
    const auto far = diff < 0.0 ? node.right : node.left;
    search(near, x, k, heap, offsets, lower_bound);

    const double saved = offsets[node.split_dim];
    const double far_bound = lower_bound - saved * saved + diff * diff;
    if (heap.size() < k || far_bound <= heap.front().first * prune_slack) {
        offsets[node.split_dim] = diff;
        search(far, x, k, heap, offsets, far_bound);
        offsets[node.split_dim] = saved;
    }
}

NeighborList NeighborIndex::line_query(double x, std::size_t k) const {
    // Merge the two runs walking away from x; each run is non-decreasing in distance.
    const auto first = std::lower_bound(packed_.begin(), packed_.end(), x);
    auto right = static_cast<std::size_t>(first - packed_.begin());
    std::size_t left = right;  // next left candidate is left - 1
    std::vector<Candidate> taken;
    taken.reserve(k + 4);
    auto d2 = [&](std::size_t pos) {
        const double t = x - packed_[pos];
        return t * t;
    };
    auto take_next = [&]() -> bool {
        const bool has_left = left > 0, has_right = right < n_;
        if (!has_left && !has_right) return false;
        if (has_right && (!has_left || d2(right) <= d2(left - 1))) {
            taken.emplace_back(d2(right), order_[right]);
            ++right;
        } else {
            --left;
            taken.emplace_back(d2(left), order_[left]);
        }
        return true;
    };
    while (taken.size() < k) take_next();
    // Pull in every candidate tied with the k-th distance, then order ties by index.
    const double kth = taken.back().first;
    while ((left > 0 && d2(left - 1) == kth) || (right < n_ && d2(right) == kth)) take_next();
    for (std::size_t s = 0; s < taken.size();) {
        std::size_t e = s + 1;
        while (e < taken.size() && taken[e].first == taken[s].first) ++e;
        if (e - s > 1) std::sort(taken.begin() + static_cast<std::ptrdiff_t>(s), taken.begin() + static_cast<std::ptrdiff_t>(e));
        s = e;
    }
    taken.resize(k);
    return to_list(taken);
}

}  // namespace nnad
