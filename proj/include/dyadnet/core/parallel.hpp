#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dyadnet {

/// Runs body(k) for k in [0, count) on up to `threads` workers using a static block partition.
/// Callers write into pre-sized, index-addressed slots, so results never depend on the
/// worker count. The first exception thrown by any worker is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
    const std::size_t workers =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = count * w / workers;
        const std::size_t hi = count * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t k = lo; k < hi; ++k) body(k);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace dyadnet
