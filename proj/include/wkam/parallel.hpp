#ifndef WKAM_PARALLEL_HPP
#define WKAM_PARALLEL_HPP

#include <algorithm>
#include <thread>
#include <vector>

namespace wkam {

/// Deterministic parallel loop over [0, n). Each index is processed exactly once;
/// results must be written to disjoint slots so thread count never changes output.
template <class Body>
void parallel_for(int n, Body&& body, int min_grain = 64) {
    unsigned hw = std::thread::hardware_concurrency();
    int nthreads = static_cast<int>(hw ? hw : 1);
    if (nthreads <= 1 || n < 2 * min_grain) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    nthreads = std::min(nthreads, (n + min_grain - 1) / min_grain);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    int chunk = (n + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
        int lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace wkam

#endif
