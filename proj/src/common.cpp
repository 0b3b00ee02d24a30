#include "boltzkit/common.hpp"

#include <algorithm>
#include <atomic>

namespace boltz {

namespace {
std::atomic<int> g_max_threads{0};
}

int max_threads() {
    const int req = g_max_threads.load();
    if (req > 0) return req;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

void parallel_for_ranges(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t nthreads = std::min<std::size_t>(max_threads(), n);
    if (nthreads <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& term) {
    if (n == 0) return 0.0;
    // Fixed chunk layout independent of the thread count, partials summed in
    // chunk order, so the result is bit-identical run to run.
    const std::size_t chunk = 4096;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(nchunks, 0.0);
    parallel_for_ranges(nchunks, [&](std::size_t cb, std::size_t ce) {
        for (std::size_t c = cb; c < ce; ++c) {
            const std::size_t b = c * chunk;
            const std::size_t e = std::min(n, b + chunk);
            double acc = 0.0;
            for (std::size_t i = b; i < e; ++i) acc += term(i);
            partial[c] = acc;
        }
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

std::string hex_digest(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace boltz
