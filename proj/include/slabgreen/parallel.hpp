#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace slabgreen {

// Worker count from SLABGREEN_THREADS, else hardware concurrency (at least 1).
unsigned worker_count();

// Evaluates f(0..n-1) on worker_count() threads; results are stored by index, so
// any reduction over the returned vector is independent of scheduling.
template <class F>
auto parallel_map(std::size_t n, F&& f) -> std::vector<decltype(f(std::size_t{0}))> {
    using T = decltype(f(std::size_t{0}));
    std::vector<T> out(n);
    const unsigned workers = std::min<std::size_t>(worker_count(), n == 0 ? 1 : n);
    if (workers <= 1) {
        for (std::size_t k = 0; k < n; ++k) out[k] = f(k);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t k = w; k < n; k += workers) out[k] = f(k);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace slabgreen
