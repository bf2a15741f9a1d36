// Runtime check for the exact neighbor index: build plus all self-queries at n = 1e5, d = 10, k = 100.

#include <chrono>
#include <cstdio>
#include <vector>

#include "nnad/neighbor_index.hpp"
#include "nnad/rng.hpp"

int main() {
    constexpr std::size_t n = 100000, d = 10, k = 100;
    constexpr double budget_seconds = 60.0;
    nnad::Rng rng(12345);
    std::vector<double> v(n * d);
    for (auto& x : v) x = rng.normal();
    const nnad::Dataset data(std::move(v), d);

    const auto start = std::chrono::steady_clock::now();
    const nnad::NeighborIndex index(data);
    const auto lists = index.query_all(k);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const bool complete = lists.size() == n && lists.back().distances.size() == k;
    const bool pass = complete && secs < budget_seconds;
    std::printf("[%s] index benchmark: n=%zu d=%zu k=%zu build and self-queries in %.2f s (budget %.0f s)\n",
                pass ? "PASS" : "FAIL", n, d, k, secs, budget_seconds);
    return pass ? 0 : 1;
}
