#pragma once

// Trial-level parallelism. Per-trial computations are independent given
// distinct trial indices; per-thread accumulators are merged in thread order
// so aggregates are deterministic.

#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace htlab {

inline unsigned thread_count() {
    if (const char* env = std::getenv("HTLAB_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Acc must be default-constructible; fn(acc, trial_index) accumulates one
// trial; merge(total, acc) folds per-thread accumulators left to right.
template <class Acc, class Fn, class Merge>
Acc parallel_trials(std::uint64_t trials, Fn&& fn, Merge&& merge) {
    unsigned nt = thread_count();
    if (trials < 2 * nt) nt = 1;
    std::vector<Acc> accs(nt);
    if (nt == 1) {
        for (std::uint64_t i = 0; i < trials; ++i) fn(accs[0], i);
    } else {
        std::vector<std::thread> threads;
        for (unsigned k = 0; k < nt; ++k) {
            std::uint64_t lo = trials * k / nt, hi = trials * (k + 1) / nt;
            threads.emplace_back([&, k, lo, hi] {
                for (std::uint64_t i = lo; i < hi; ++i) fn(accs[k], i);
            });
        }
        for (auto& t : threads) t.join();
    }
    Acc total = std::move(accs[0]);
    for (unsigned k = 1; k < nt; ++k) merge(total, accs[k]);
    return total;
}

}  // namespace htlab
