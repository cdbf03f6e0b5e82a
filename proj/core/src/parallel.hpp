#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace circlepat::detail
{

// Splits [0, n) into `threads` contiguous chunks and calls
// fn(chunk, begin, end) for each. Chunk boundaries depend only on n and the
// thread count. The first exception thrown by any chunk is rethrown.
template <class Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn)
{
    const std::size_t parts = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    if (parts <= 1) {
        fn(std::size_t{0}, std::size_t{0}, n);
        return;
    }
    std::vector<std::exception_ptr> errors(parts);
    std::vector<std::thread> pool;
    pool.reserve(parts);
    for (std::size_t c = 0; c < parts; ++c) {
        const std::size_t begin = n * c / parts;
        const std::size_t end = n * (c + 1) / parts;
        pool.emplace_back([&, c, begin, end] {
            try {
                fn(c, begin, end);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

inline std::size_t chunk_count(std::size_t n, unsigned threads)
{
    return std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
}

}  // namespace circlepat::detail
