#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace subdiff::harness {

// Schedules fn(i) for i in [0, n) over a small pool. Each task must write
// only its own output slot; with per-index rng streams the results are
// independent of the worker count and of scheduling order.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const std::size_t chunk = std::max<std::size_t>(1, n / (workers * 64));
    auto body = [&]() {
        for (;;) {
            const std::size_t base = next.fetch_add(chunk);
            if (base >= n) return;
            const std::size_t end = std::min(n, base + chunk);
            for (std::size_t i = base; i < end; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
}

}  // namespace subdiff::harness
