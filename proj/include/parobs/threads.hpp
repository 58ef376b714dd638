#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace parobs {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
/// processed exactly once and writes only its own outputs, so results are
/// identical for any worker count.
inline void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto body = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    const int spawn = std::min(workers, count) - 1;
    std::vector<std::thread> pool;
    pool.reserve(spawn);
    for (int i = 0; i < spawn; ++i) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
}

inline int default_workers(int cap) {
    const unsigned hw = std::thread::hardware_concurrency();
    const int w = hw == 0 ? 1 : static_cast<int>(hw);
    return std::min(w, cap);
}

}  // namespace parobs
