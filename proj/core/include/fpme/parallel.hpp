#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace fpme {

/// Worker cap: FPME_THREADS if set and positive, else hardware concurrency.
inline int worker_count() {
    int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("FPME_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) return std::min(cap, hw);
    }
    return hw;
}

/// Runs fn(i) for i in [begin, end) on contiguous chunks. Each index is
/// handled by exactly one worker, so results written per index are
/// independent of the worker count.
template <typename Fn>
void parallel_for(int begin, int end, Fn&& fn) {
    const int count = end - begin;
    if (count <= 0) return;
    const int workers = std::min(worker_count(), count);
    if (workers <= 1 || count < 64) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int lo = begin + w * chunk;
        const int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
}

}  // namespace fpme
