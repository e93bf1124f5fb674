#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace hardy {

/// Process-wide worker cap, set once by the CLI --threads flag.
void set_thread_cap(unsigned n);
unsigned thread_cap();

/// Runs fn(i) for i in [0, n). Work is pre-partitioned into contiguous
/// chunks and every fn(i) writes only to its own slot, so results do not
/// depend on the number of workers.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned workers = thread_cap();
    if (workers <= 1 || n < 2 * workers) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace hardy
