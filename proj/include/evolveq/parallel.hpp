#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace evolveq {

/// Worker cap: EVOLVEQ_THREADS when set (>= 1), hardware concurrency
/// otherwise, never more than there are jobs.
inline unsigned worker_count(std::size_t jobs) {
    if (jobs <= 1) return 1;
    unsigned cap = std::thread::hardware_concurrency();
    if (cap == 0) cap = 1;
    if (const char* env = std::getenv("EVOLVEQ_THREADS")) {
        try {
            long v = std::stol(env);
            if (v >= 1) cap = static_cast<unsigned>(v);
        } catch (...) {
            // unparsable value: keep the hardware default
        }
    }
    return static_cast<unsigned>(std::min<std::size_t>(cap, jobs));
}

/// Runs fn(i) for i in [0, n). Each index writes only caller-owned slots,
/// so results are independent of the worker count; reductions stay with
/// the caller and run sequentially. The first exception thrown by any
/// worker is rethrown on the calling thread after all workers join.
template <typename F>
void parallel_for(std::size_t n, F&& fn) {
    const unsigned workers = worker_count(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn, slot = &errors[w]] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                *slot = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    // Rethrow the lowest-index failure so the reported locus does not depend
    // on worker timing.
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

} // namespace evolveq
