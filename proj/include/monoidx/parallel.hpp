#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace monoidx {

namespace detail {

inline std::atomic<unsigned>& thread_cap() {
    static std::atomic<unsigned> cap{0};  // 0: use the hardware default
    return cap;
}

inline thread_local bool inside_parallel_region = false;

}  // namespace detail

// Caps the number of worker threads used by parallel_for; 0 restores the
// hardware default. Only wall time may depend on this setting, never results.
inline void set_max_threads(unsigned count) { detail::thread_cap().store(count); }

inline unsigned max_threads() {
    const unsigned cap = detail::thread_cap().load();
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return cap == 0 ? hw : std::max(1u, cap);
}

// Runs body(i) for every i in [0, count), split into contiguous chunks, one
// per worker. The body must only write to caller-provided slots indexed by i;
// under that discipline the outcome is identical for every worker count.
// Nested calls degrade to serial execution.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    if (count == 0) return;
    const auto workers =
        static_cast<std::size_t>(std::min<std::size_t>(max_threads(), count));
    if (workers <= 1 || detail::inside_parallel_region) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(count, w * chunk);
        const std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&body, &errors, begin, end, w] {
            detail::inside_parallel_region = true;
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
            detail::inside_parallel_region = false;
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace monoidx
