#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bivruin {

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Splits [0, n) into contiguous blocks, one thread per block. The caller must
// merge results in a worker-count independent way (per-index slots or integer
// counts), so estimates stay bit-identical for any worker count.
template <typename Body>
void parallel_blocks(std::uint64_t n, int workers, Body&& body) {
    const std::uint64_t nw = std::min<std::uint64_t>(
        static_cast<std::uint64_t>(resolve_workers(workers)), n == 0 ? 1 : n);
    if (n == 0) return;
    if (nw <= 1) {
        body(std::uint64_t{0}, n);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(nw);
    std::exception_ptr error;
    std::mutex error_mu;
    for (std::uint64_t w = 0; w < nw; ++w) {
        const std::uint64_t begin = n * w / nw;
        const std::uint64_t end = n * (w + 1) / nw;
        threads.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace bivruin
