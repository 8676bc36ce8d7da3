#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace entropy::detail {

// Runs body(begin, end) over contiguous chunks of [0, count). Each index is
// handled by exactly one call, so results written per index do not depend on
// the thread count.
template <class Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count / 256 + 1));
    if (workers == 1) {
        body(std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : pool) t.join();
}

// Calls body(i) for every i in [0, count), handing out indices one at a time
// (trials are few and uneven in cost).
template <class Body>
void parallel_indices(std::size_t count, unsigned threads, Body&& body) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace entropy::detail
