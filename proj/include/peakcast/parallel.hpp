#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace peakcast {

/// Runs fn(i) for each i in [0, n) on up to `threads` workers (hardware
/// concurrency by default). fn must be safe to call concurrently for distinct
/// indices; per-index outputs keep results deterministic regardless of
/// scheduling. The first exception, if any, is rethrown on the caller.
template <typename Fn>
void parallel_for_index(std::size_t n, Fn&& fn, unsigned threads = 0) {
    if (n == 0) return;
    unsigned nthreads = threads ? threads : std::thread::hardware_concurrency();
    if (nthreads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    nthreads = std::min<std::size_t>(nthreads, n);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace peakcast
