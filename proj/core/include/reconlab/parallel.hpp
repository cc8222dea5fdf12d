#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace reconlab {

inline unsigned default_jobs() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

/** Run fn(i) for i in [0, n) on up to `jobs` threads. Work is handed out in
 *  fixed-size blocks; callers must write results into preallocated per-index
 *  slots so the outcome is independent of the thread count. The first
 *  exception thrown by any worker is rethrown on the calling thread. */
template <typename Fn>
void parallel_for(std::uint64_t n, unsigned jobs, Fn&& fn) {
    if (n == 0) return;
    if (jobs == 0) jobs = default_jobs();
    if (jobs > n) jobs = static_cast<unsigned>(n);
    if (jobs <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    std::exception_ptr error;
    std::mutex error_mu;
    for (unsigned w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w]() {
            try {
                // strided assignment: worker w owns i = w, w+jobs, w+2*jobs, ...
                for (std::uint64_t i = w; i < n; i += jobs) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace reconlab
