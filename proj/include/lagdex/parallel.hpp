#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lagdex::detail {

/// Calls body(i) for every i in [0, count) on up to `workers` threads.
/// Work is claimed in chunks from a shared counter, so the schedule varies
/// between runs; callers must write results by index. If any call throws,
/// the exception from the lowest index is rethrown after all threads join.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body)
{
    workers = std::max(1u, workers);
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    constexpr std::size_t chunk = 16;
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::size_t error_index = count;
    std::exception_ptr error;

    auto run = [&] {
        for (;;) {
            const std::size_t from = next.fetch_add(chunk);
            if (from >= count) return;
            const std::size_t to = std::min(count, from + chunk);
            for (std::size_t i = from; i < to; ++i) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (i < error_index) {
                        error_index = i;
                        error = std::current_exception();
                    }
                }
            }
        }
    };
    std::vector<std::jthread> threads;
    const auto n = std::min<std::size_t>(workers, count);
    threads.reserve(n);
    for (std::size_t t = 0; t < n; ++t) threads.emplace_back(run);
    threads.clear();
    if (error) std::rethrow_exception(error);
}

} // namespace lagdex::detail
