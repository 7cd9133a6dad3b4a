#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ossrisk::detail {

// Calls make_worker() once per thread, then worker(i) for i in [0, count),
// thread t taking indices t, t + jobs, ... Callers write results into
// per-index slots, so the outcome does not depend on `jobs`. The first
// exception thrown by any worker is rethrown after all threads join.
template <class MakeWorker>
void parallel_for(std::size_t count, unsigned jobs, MakeWorker make_worker) {
    jobs = static_cast<unsigned>(std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1)));
    if (jobs == 1) {
        auto worker = make_worker();
        for (std::size_t i = 0; i < count; ++i) worker(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
        threads.emplace_back([&, t] {
            try {
                auto worker = make_worker();
                for (std::size_t i = t; i < count; i += jobs) worker(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace ossrisk::detail
