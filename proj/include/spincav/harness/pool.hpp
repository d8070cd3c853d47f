#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace spincav::harness {

// Worker count: SPINCAV_THREADS if set to a positive integer, else the hardware concurrency, never above jobs.
std::size_t worker_count(std::size_t jobs);

// Runs fn(0..n-1) on a pool; results are stored by index so the output order never depends on scheduling.
// The first exception thrown by any job is rethrown after all workers stop.
template <class R>
std::vector<R> run_indexed(std::size_t n, const std::function<R(std::size_t)>& fn) {
    std::vector<R> out(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    const std::size_t workers = worker_count(n);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace spincav::harness
