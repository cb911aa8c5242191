#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace blockscope {

/// Runs fn(i) for i in [0, count) on at most `workers` threads. Results land
/// at their input index, so output order never depends on completion order.
/// The first exception thrown by any task is rethrown after all threads join.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t count, std::size_t workers, Fn&& fn) {
    std::vector<Result> out(count);
    if (count == 0) return out;
    workers = std::clamp<std::size_t>(workers, 1, count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace blockscope
