#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace rdm {

// Runs fn(i) for i in [0, n). Each index is processed exactly once; callers
// write results into per-index slots and reduce sequentially afterwards, so
// the outcome is identical for every worker count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t nt = static_cast<std::size_t>(threads);
    if (nt > n) nt = n;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace rdm
