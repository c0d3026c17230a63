#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace xva {

/// Chunk size used for every data-parallel loop. Fixed so that per-chunk
/// partial sums, reduced in chunk order, do not depend on the thread count.
inline constexpr std::size_t kChunk = 512;

inline std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

/// Calls f(chunk, begin, end) for every chunk of [0, n). Chunks are handed out
/// dynamically to `threads` workers; the first exception is rethrown.
template <typename F>
void parallel_chunks(std::size_t n, int threads, F&& f) {
    const std::size_t chunks = chunk_count(n);
    auto run = [&](std::size_t c) { f(c, c * kChunk, std::min(n, (c + 1) * kChunk)); };
    const int workers = static_cast<int>(std::min<std::size_t>(std::max(threads, 1), chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                run(c);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = chunks;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Runs f(i) for i in [0, n) with one task per index (coarse-grained work).
template <typename F>
void parallel_tasks(std::size_t n, int threads, F&& f) {
    const int workers = static_cast<int>(std::min<std::size_t>(std::max(threads, 1), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace xva
