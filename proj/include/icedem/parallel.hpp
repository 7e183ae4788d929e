#ifndef ICEDEM_PARALLEL_HPP
#define ICEDEM_PARALLEL_HPP

#include <cstddef>
#include <thread>
#include <vector>

namespace icedem {

/// Static-partition parallel loop. Each index is processed exactly once and
/// writes only its own slot, so results are identical for any worker count;
/// ordered reductions stay with the caller.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([lo, hi, &f] {
            for (std::size_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace icedem

#endif  // ICEDEM_PARALLEL_HPP
