#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "es/common.hpp"

namespace es {

// Runs body(chunk) for chunk in [0, chunks) on up to `workers` threads.
// Chunks are claimed dynamically, so callers must write results into
// per-chunk slots and merge them in chunk order afterwards; that keeps every
// total independent of the worker count. The first exception is rethrown.
template <class Body>
void parallel_chunks(std::size_t chunks, unsigned workers, Body&& body) {
    if (workers == 0) throw ConfigError("worker count must be at least 1");
    if (workers == 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                body(c);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(chunks);
                return;
            }
        }
    };
    const unsigned n = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
    std::vector<std::thread> pool;
    pool.reserve(n - 1);
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace es
