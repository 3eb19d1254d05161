#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace mgs {

namespace detail {
inline std::atomic<int>& thread_count_slot() {
    static std::atomic<int> n{0};
    return n;
}
}  // namespace detail

// 0 means auto (hardware concurrency). Initialized once from
// MIPMAPGS_THREADS; tests may override via set_thread_count.
inline void set_thread_count(int n) { detail::thread_count_slot().store(n < 0 ? 0 : n); }

inline int thread_count() {
    static const int env_init = [] {
        if (const char* s = std::getenv("MIPMAPGS_THREADS")) {
            int v = std::atoi(s);
            if (v > 0) return v;
        }
        return 0;
    }();
    int n = detail::thread_count_slot().load();
    if (n == 0) n = env_init;
    if (n == 0) n = int(std::thread::hardware_concurrency());
    return n > 0 ? n : 1;
}

namespace detail {
inline bool& in_parallel_region() {
    thread_local bool flag = false;
    return flag;
}
}  // namespace detail

// Runs fn(i) for i in [0, n). Results must be written to disjoint,
// index-addressed slots so the outcome is independent of the worker count.
// Nested calls run serially on the calling worker.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    int workers = std::min(thread_count(), n);
    if (workers <= 1 || detail::in_parallel_region()) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            detail::in_parallel_region() = true;
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace mgs
