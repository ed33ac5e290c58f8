#pragma once

// Ordered parallel map-reduce over trial indices. The trial range is cut
// into fixed-size chunks independent of the worker count; each chunk
// produces a partial result and partials are folded in chunk order, so the
// result is bitwise identical for any number of workers.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pinchfl {

inline constexpr std::uint64_t kDefaultChunk = 4096;

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// chunk_fn(begin, end) -> Partial;  fold(Partial& acc, const Partial& part).
// `init` must be an identity of `fold`.
template <class Partial, class ChunkFn, class Fold>
Partial ordered_reduce(std::uint64_t n, Partial init, ChunkFn chunk_fn, Fold fold, unsigned threads = 0,
                       std::uint64_t chunk = kDefaultChunk) {
    if (n == 0) return init;
    const std::uint64_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<Partial> parts(n_chunks, init);
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), n_chunks));

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                const std::uint64_t b = c * chunk;
                parts[c] = chunk_fn(b, std::min(n, b + chunk));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n_chunks;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    Partial acc = std::move(init);
    for (const auto& p : parts) fold(acc, p);
    return acc;
}

}  // namespace pinchfl
