/*
   Copyright 2026 The dpre Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dpre {

/// Resolves a worker-count hint; 0 means one per hardware thread.
inline unsigned resolve_workers(unsigned hint)
{
    if (hint > 0) {
        return hint;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls task(i) for every i in [0, n_tasks) on up to `workers` threads.
/// Tasks must write only to their own slot. After a failure no new tasks are
/// started; every lower index was already claimed, so the exception rethrown
/// (that of the lowest failing index) does not depend on scheduling.
template <typename Task>
void run_indexed(std::size_t n_tasks, unsigned workers, Task&& task)
{
    std::vector<std::exception_ptr> errors(n_tasks);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_tasks) {
                break;
            }
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true);
            }
        }
    };

    const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), n_tasks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w) {
            pool.emplace_back(worker);
        }
    }

    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace dpre
