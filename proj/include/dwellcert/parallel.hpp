#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace dwellcert {

/// Worker-thread budget: hardware concurrency, overridable (in either
/// direction) through DWELLCERT_THREADS.
inline int thread_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("DWELLCERT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) {
            return static_cast<int>(v);
        }
    }
    return static_cast<int>(hw);
}

/// Chunked index-space reduction. per(state, i) folds item i into a chunk
/// state; merge(total, chunk) combines chunk states in chunk order. Results
/// are independent of the thread count as long as per-item work is
/// independent and merge is associative over exact operations (max, integer
/// counts), which is how every caller here uses it.
template <class State, class PerIndex, class Merge>
State parallel_reduce(std::size_t n, State init, PerIndex per, Merge merge) {
    const std::size_t want = static_cast<std::size_t>(std::max(thread_cap(), 1));
    const std::size_t chunks = std::min(n, want);
    if (chunks <= 1) {
        State s = init;
        for (std::size_t i = 0; i < n; ++i) {
            per(s, i);
        }
        return s;
    }
    std::vector<State> parts(chunks, init);
    std::vector<std::exception_ptr> errors(chunks);
    std::vector<std::thread> threads;
    threads.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t begin = n * c / chunks;
        const std::size_t end = n * (c + 1) / chunks;
        threads.emplace_back([&, c, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    per(parts[c], i);
                }
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
    State total = init;
    for (State& p : parts) {
        merge(total, p);
    }
    return total;
}

}  // namespace dwellcert
