#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sievelab {

namespace detail {
inline std::atomic<unsigned>& thread_setting()
{
    static std::atomic<unsigned> n{1};
    return n;
}
} // namespace detail

// Worker count used by every parallel evaluator. 0 means hardware concurrency.
inline void set_thread_count(unsigned n)
{
    detail::thread_setting().store(n == 0 ? std::max(1u, std::thread::hardware_concurrency()) : n);
}

inline unsigned thread_count() { return detail::thread_setting().load(); }

// Evaluates fn(i) for i in [0, count) and returns the results indexed by i.
// Results never depend on the worker count: each slot is written by exactly
// one call and callers reduce the vector in index order.
template <typename Fn>
auto parallel_map(std::size_t count, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))>
{
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(count);
    unsigned workers = std::min<std::size_t>(thread_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(count);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

} // namespace sievelab
