#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace weinstein::lab {

/// out[i] = fn(i) for i < count on up to `workers` threads. Results are placed
/// by index, so the output does not depend on scheduling. The first exception
/// thrown by any task is rethrown after all workers finish.
template <class Fn>
auto parallel_map(std::size_t count, unsigned workers, Fn fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
    using Result = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<std::optional<Result>> slots(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };
    const auto threads = std::min<std::size_t>(std::max(workers, 1u), count);
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    std::vector<Result> out;
    out.reserve(count);
    for (auto& slot : slots) {
        out.push_back(std::move(*slot));
    }
    return out;
}

} // namespace weinstein::lab
