#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace hyperlip {

// HYPERLIP_THREADS caps worker threads; unset means hardware concurrency.
inline int thread_count() {
    static int cached = [] {
        int hw = (int)std::thread::hardware_concurrency();
        if (hw <= 0) hw = 1;
        if (const char* env = std::getenv("HYPERLIP_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v < 256 ? v : 256;
        }
        return hw;
    }();
    return cached;
}

// Splits [0, n) into chunks, runs body(lo, hi, chunk_index) on workers, and
// returns the number of chunks. Chunk results must be merged by index so the
// outcome is independent of scheduling.
inline int parallel_chunks(std::int64_t n, const std::function<void(std::int64_t, std::int64_t, int)>& body) {
    int threads = thread_count();
    if (threads <= 1 || n < 4096) {
        body(0, n, 0);
        return 1;
    }
    int chunks = threads;
    std::int64_t step = (n + chunks - 1) / chunks;
    std::vector<std::thread> pool;
    int used = 0;
    for (int c = 0; c < chunks; ++c) {
        std::int64_t lo = c * step;
        if (lo >= n) break;
        std::int64_t hi = lo + step < n ? lo + step : n;
        pool.emplace_back([&body, lo, hi, c] { body(lo, hi, c); });
        ++used;
    }
    for (auto& t : pool) t.join();
    return used;
}

} // namespace hyperlip
