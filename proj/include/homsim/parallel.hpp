#pragma once

#include <thread>
#include <vector>

namespace homsim {

/// Chunked parallel map over [0, n); fn(i) must write only to slot i of its
/// output, which keeps results deterministic regardless of thread count.
template <typename Fn>
void parallel_for(int n, int threads, const Fn& fn) {
    if (threads <= 1 || n < 2) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([=] {
            for (int i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace homsim
