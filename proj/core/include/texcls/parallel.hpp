#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace texcls {

/// Worker count to use when the caller asks for "all": hardware concurrency, at least 1.
inline unsigned default_workers() noexcept {
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) on up to `workers` threads. Results must be written
/// to index-addressed slots so the outcome does not depend on scheduling. If any call
/// throws, the exception from the lowest failing index is rethrown after all workers join.
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    if (n == 0) {
        return;
    }
    const auto threads = static_cast<std::size_t>(std::clamp<std::size_t>(workers, 1, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace texcls
