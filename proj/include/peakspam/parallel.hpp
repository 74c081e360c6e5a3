#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace peakspam {

// Worker count used when a caller passes 0: PEAKSPAM_THREADS if it holds a
// positive integer, otherwise the hardware concurrency (at least 1).
std::size_t default_thread_count();

inline std::size_t resolve_threads(std::size_t requested) {
    return requested > 0 ? requested : default_thread_count();
}

// Runs fn(i) for every i in [0, n) on up to `threads` workers. Work is split
// into contiguous chunks; fn must only write state owned by index i, so the
// result never depends on the worker count.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    const std::size_t workers = std::min(resolve_threads(threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
}

}  // namespace peakspam
