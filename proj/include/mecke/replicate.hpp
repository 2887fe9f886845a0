#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

#include "mecke/rng.hpp"

namespace mecke {

// Seeding and parallelism shared by every replicated experiment.
struct RunContext {
    std::uint64_t master_seed = 0;
    unsigned jobs = 1;

    // Stream for replication `index` of the experiment family `purpose`.
    PhiloxStream stream(std::uint64_t purpose, std::uint64_t index) const {
        return PhiloxStream(derive_key(master_seed, purpose), index);
    }
};

// Runs body(i) for i in [0, n) on up to `jobs` threads and returns the
// results in index order.
template <class Body>
auto replicate(std::size_t n, unsigned jobs, Body&& body) -> std::vector<std::invoke_result_t<Body&, std::size_t>> {
    using Result = std::invoke_result_t<Body&, std::size_t>;
    std::vector<Result> out(n);
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = body(i);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        out[i] = body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = n;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace mecke
