// ============================================================================
// straloop/parallel.hpp — bounded fork/join over independent indices
// ============================================================================

#ifndef STRALOOP_PARALLEL_HPP
#define STRALOOP_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace straloop {

// Worker cap: STRALOOP_THREADS when set, else hardware concurrency.
inline unsigned thread_budget(size_t njobs) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("STRALOOP_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) hw = static_cast<unsigned>(v);
    }
    if (njobs < hw) hw = static_cast<unsigned>(njobs);
    return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, n); fn must only write to per-index slots.
// The first exception is rethrown on the caller thread.
template <class Fn>
void parallel_for_index(size_t n, Fn&& fn) {
    if (n == 0) return;
    unsigned workers = thread_budget(n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr firstError;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) firstError = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (firstError) std::rethrow_exception(firstError);
}

} // namespace straloop

#endif // STRALOOP_PARALLEL_HPP
