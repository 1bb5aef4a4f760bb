#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace interf {

/// Evaluates fn(i) for i in [0, count) on a pool of threads and returns the
/// results in index order.  The first exception thrown by any task is
/// rethrown on the calling thread.
template <class Fn>
auto parallel_map(std::size_t count, Fn &&fn, unsigned threads = 0)
    -> std::vector<std::invoke_result_t<Fn &, std::size_t>> {
    using R = std::invoke_result_t<Fn &, std::size_t>;
    std::vector<R> out(count);
    if (count == 0)
        return out;
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

} // namespace interf
