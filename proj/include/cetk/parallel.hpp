#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cetk {

namespace detail {
inline std::atomic<unsigned> g_threads{1};
inline thread_local bool t_in_worker = false;
}

/// Worker count for parallel_for; 0 selects hardware concurrency.
inline void set_threads(unsigned n) {
    if (n == 0) {
        n = std::max(1u, std::thread::hardware_concurrency());
    }
    detail::g_threads.store(n);
}

inline unsigned threads() { return detail::g_threads.load(); }

/// Runs fn(i) for i in [0, n) over contiguous chunks. fn must only write to
/// slots owned by i, so results never depend on the schedule. Nested calls
/// from inside a worker run serially.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t min_parallel = 64) {
    const std::size_t workers = std::min<std::size_t>(threads(), n);
    if (workers <= 1 || n < min_parallel || detail::t_in_worker) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&, begin, end] {
            detail::t_in_worker = true;
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    fn(i);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace cetk
