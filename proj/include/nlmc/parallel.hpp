#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nlmc {

/// Runs fn(k) for k in [0, count) on up to `threads` workers. Work items must
/// write only to their own output slot; results are then independent of
/// scheduling. The exception of the lowest failing index is rethrown.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn)
{
    threads = std::clamp(threads, 1, std::max(count, 1));
    if (threads == 1) {
        for (int k = 0; k < count; ++k)
            fn(k);
        return;
    }
    std::atomic<int> next{0};
    std::mutex guard;
    std::exception_ptr error;
    int error_index = count;
    auto worker = [&] {
        for (int k = next++; k < count; k = next++) {
            try {
                fn(k);
            } catch (...) {
                std::lock_guard lock(guard);
                if (k < error_index) {
                    error_index = k;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    pool.clear();
    if (error)
        std::rethrow_exception(error);
}

} // namespace nlmc
