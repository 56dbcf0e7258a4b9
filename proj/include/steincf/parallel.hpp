#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace steincf {

inline unsigned worker_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs body(task_index) for task_index in [0, n_tasks). Tasks carry their own
// RNG substreams and write to disjoint slots, so scheduling cannot affect
// results; reductions happen afterwards in task order.
template <class Body>
void parallel_tasks(std::size_t n_tasks, Body&& body) {
    const unsigned workers = std::min<std::size_t>(worker_count(), n_tasks);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n_tasks; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace steincf
