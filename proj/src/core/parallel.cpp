// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ddc {

uint32_t resolve_threads(uint32_t requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(uint32_t threads, int64_t n, const std::function<void(int64_t)>& fn) {
    if (n <= 0) return;
    threads = resolve_threads(threads);
    if (threads <= 1 || n == 1) {
        for (int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const uint32_t workers = uint32_t(std::min<int64_t>(threads, n));
    std::atomic<int64_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto body = [&] {
        for (;;) {
            const int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (uint32_t t = 0; t < workers; ++t) pool.emplace_back(body);
    for (auto& worker : pool) worker.join();
    if (error) std::rethrow_exception(error);
}

} // namespace ddc
