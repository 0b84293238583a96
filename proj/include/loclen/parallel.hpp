#pragma once

// Fixed-partition parallel loop. Work items [0, n) are split into `chunks`
// contiguous ranges; each range is processed by exactly one thread and writes
// only to its own slot, so callers can reduce the slots in order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace loclen::parallel {

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// body(chunk, begin, end) for every chunk.
template <class Body>
void for_chunks(std::uint64_t n, std::uint64_t chunks, unsigned threads, Body&& body) {
    chunks = std::max<std::uint64_t>(1, std::min(chunks, n));
    threads = static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(threads), chunks));
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                body(c, c * n / chunks, (c + 1) * n / chunks);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

/// Running mean and centred second moment per coordinate; merge() is the
/// pairwise update of Chan et al.
struct Welford {
    std::uint64_t count = 0;
    std::vector<double> mean;
    std::vector<double> m2;

    explicit Welford(std::size_t dim = 0) : mean(dim, 0.0), m2(dim, 0.0) {}

    void add(const std::vector<double>& x) {
        ++count;
        const double inv = 1.0 / static_cast<double>(count);
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double d = x[i] - mean[i];
            mean[i] += d * inv;
            m2[i] += d * (x[i] - mean[i]);
        }
    }

    void merge(const Welford& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
        const double n = na + nb;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double d = o.mean[i] - mean[i];
            mean[i] += d * nb / n;
            m2[i] += o.m2[i] + d * d * na * nb / n;
        }
        count += o.count;
    }

    double std_error(std::size_t i) const {
        if (count < 2) return 0.0;
        const double n = static_cast<double>(count);
        return std::sqrt(std::max(0.0, m2[i]) / (n - 1.0) / n);
    }
};

constexpr std::uint64_t kDefaultChunks = 64;

}  // namespace loclen::parallel
