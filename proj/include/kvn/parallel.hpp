#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace kvn {

// Worker cap, settable via the KVN_THREADS environment variable.
inline int max_threads() {
    static const int cached = [] {
        if (const char* env = std::getenv("KVN_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        unsigned hw = std::thread::hardware_concurrency();
        return static_cast<int>(std::clamp(hw, 1u, 8u));
    }();
    return cached;
}

// Deterministic parallel map over [0, n): each index is processed exactly once,
// writes must target disjoint locations. Reductions stay sequential elsewhere.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = std::min(max_threads(), n);
    if (workers <= 1 || n < 4) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace kvn
