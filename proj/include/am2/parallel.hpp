#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace am2::detail {

/// Runs body(0..n-1) on `jobs` threads pulling indices from a shared counter.
/// jobs <= 0 means hardware concurrency. Results must be written by index for determinism.
template <class F>
void parallel_rows(int rows, int jobs, F&& body) {
    if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    jobs = std::min(jobs, rows);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int j = next++; j < rows; j = next++) body(j);
    };
    if (jobs <= 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace am2::detail
