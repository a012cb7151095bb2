#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace proxynas {

/// Runs fn(i) for i in [0, n) on `workers` threads.  Work items are claimed
/// from a shared atomic counter; each item writes only to its own index, so
/// results are identical for any worker count.
template <typename Fn>
void parallel_for(int n, int workers, Fn&& fn) {
    if (n <= 0) return;
    if (workers <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int thread_count = std::min(workers, n);
    std::atomic<int> next{0};
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) {
        threads.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : threads) th.join();
}

} // namespace proxynas
