#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace kcca {

/// Worker count used by the library's internal parallel loops. Zero means
/// std::thread::hardware_concurrency().
void set_num_threads(int n);
int num_threads();

/// Runs body(begin, end) over contiguous chunks of [0, count). Every index is
/// visited exactly once and chunk boundaries never affect per-index results,
/// so callers that write disjoint outputs are deterministic for any thread
/// count.
template <class Body>
void parallel_for(std::ptrdiff_t count, Body&& body) {
    if (count <= 0) return;
    const auto workers = static_cast<std::ptrdiff_t>(
        std::min<std::ptrdiff_t>(num_threads(), count));
    if (workers <= 1) {
        body(std::ptrdiff_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::ptrdiff_t chunk = (count + workers - 1) / workers;
    for (std::ptrdiff_t w = 0; w < workers; ++w) {
        const std::ptrdiff_t begin = w * chunk;
        const std::ptrdiff_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace kcca
