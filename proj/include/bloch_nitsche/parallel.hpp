// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace bloch_nitsche {

/// Worker count: `requested` if positive, else hardware concurrency; capped by
/// BLOCH_NITSCHE_THREADS when set.
inline int resolve_threads(int requested)
{
    int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("BLOCH_NITSCHE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0 && cap < n) n = cap;
    }
    return n;
}

/// Evaluates f(0..count-1) on up to `threads` workers. Results come back in index
/// order; the exception of the lowest failing index is rethrown after the join.
template <class F>
auto parallel_map(std::size_t count, int threads, F&& f) -> std::vector<decltype(f(std::size_t{}))>
{
    using R = decltype(f(std::size_t{}));
    std::vector<std::optional<R>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    if (n == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace bloch_nitsche
