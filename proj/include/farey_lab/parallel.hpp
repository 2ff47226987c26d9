#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace farey_lab {

/// Worker count when the caller passes 0: FAREY_LAB_THREADS if set and
/// positive, otherwise the hardware concurrency.
inline unsigned default_threads() {
    if (const char* env = std::getenv("FAREY_LAB_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(0) .. fn(n-1) on a small pool and returns the results in index
/// order, so any merge over the result vector is schedule-independent.
template <typename Fn>
auto parallel_map(std::size_t n, unsigned threads, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
    using Result = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<Result> results(n);
    if (threads == 0) threads = default_threads();
    if (threads > n) threads = static_cast<unsigned>(n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        results[i] = fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace farey_lab
