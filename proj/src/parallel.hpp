#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rissk::detail {

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(chunk_index) for chunk_index in [0, n_chunks) on up to `workers`
/// threads. Chunks are claimed dynamically; callers write results into
/// per-chunk slots so the merge order never depends on scheduling.
template <class Fn>
void for_each_chunk(int n_chunks, int workers, Fn&& fn) {
    workers = std::max(1, std::min(resolve_workers(workers), n_chunks));
    if (workers == 1) {
        for (int c = 0; c < n_chunks; ++c) fn(c);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int c = next.fetch_add(1);
                if (c >= n_chunks) return;
                try {
                    fn(c);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next.store(n_chunks);
                    return;
                }
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
}

/// Splits [begin, end) into n_chunks contiguous ranges; returns range c.
inline std::pair<std::int64_t, std::int64_t> chunk_range(std::int64_t begin, std::int64_t end, int n_chunks,
                                                         int c) {
    const std::int64_t n = end - begin;
    const std::int64_t lo = begin + n * c / n_chunks;
    const std::int64_t hi = begin + n * (c + 1) / n_chunks;
    return {lo, hi};
}

}  // namespace rissk::detail
