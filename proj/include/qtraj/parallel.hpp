#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace qtraj {

// Worker count for embarrassingly parallel sweeps: QTRAJ_THREADS wins,
// otherwise hardware concurrency (clamped; these loops are compute-bound).
inline int worker_count() {
    if (const char* env = std::getenv("QTRAJ_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return std::min(n, 64);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(std::min(hc, 16u));
}

// Deterministic index-space map: fn(i) must write only to slot i of some
// preallocated output and must not throw (wrap per-item errors into the
// result record).  Results are then identical for any thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace qtraj
