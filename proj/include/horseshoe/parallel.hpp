#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace horseshoe {

inline int worker_count(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HORSESHOE_LAB_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, n) over a fixed partition; results are written to
// index i of a caller-owned vector, so reductions stay deterministic.
inline void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0) {
    int nw = std::min(worker_count(threads), std::max(n, 1));
    if (nw <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nw));
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < n; i += nw) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace horseshoe
