#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace reg3d {

// Runs fn(i) for i in [0, n) across `threads` workers on contiguous index
// blocks. Work items must be independent; the partition does not affect
// results, only wall time.
inline void parallel_for(size_t n, int threads,
                         const std::function<void(size_t)>& fn) {
    size_t workers = size_t(threads < 1 ? 1 : threads);
    if (workers > n) workers = n == 0 ? 1 : n;
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    size_t chunk = (n + workers - 1) / workers;
    for (size_t w = 0; w < workers; ++w) {
        size_t begin = w * chunk;
        size_t end = begin + chunk < n ? begin + chunk : n;
        pool.emplace_back([&, w, begin, end] {
            try {
                for (size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace reg3d
