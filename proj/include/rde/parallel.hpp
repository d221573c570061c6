#pragma once

#include <thread>
#include <vector>

namespace rde {

// Compensated (Kahan) accumulator; used everywhere bit-stable sums matter.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double get() const { return s; }
};

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

// Runs fn(unit) for unit in [0, num_units). Work is partitioned statically so
// results deposited into per-unit slots are identical for any thread count;
// callers reduce the slots in unit order afterwards.
template <typename Fn>
void run_units(int num_units, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || num_units <= 1) {
        for (int u = 0; u < num_units; ++u) fn(u);
        return;
    }
    if (threads > num_units) threads = num_units;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([t, threads, num_units, &fn]() {
            for (int u = t; u < num_units; u += threads) fn(u);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace rde
