// Tiny fork-join helper for the per-round parallel-for blocks. Work items own
// disjoint output slots, so a static range split is enough.

#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace offws {

template <typename Fn>
void parallelFor(size_t n, int workers, const Fn& fn) {
    if (workers <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    size_t count = std::min<size_t>(workers, n);
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (size_t w = 0; w < count; ++w) {
        size_t begin = n * w / count;
        size_t end = n * (w + 1) / count;
        pool.emplace_back([&fn, begin, end] {
            for (size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline int defaultWorkerCount() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

}  // namespace offws
