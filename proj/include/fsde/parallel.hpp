#pragma once

#include <cstddef>
#include <cstdlib>
#include <omp.h>
#include <string>

namespace fsde {

// Worker-count resolution: explicit argument wins, then FSDE_THREADS, then
// the OpenMP default. 0 means "resolve".
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FSDE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return omp_get_max_threads();
}

// OpenMP-parallel index loop. Each iteration must write only to its own
// output slots; results are then identical for every worker count.
template <class Fn>
void parallel_for(std::size_t n, int threads, const Fn& fn) {
    const int nt = resolve_threads(threads);
#pragma omp parallel for schedule(static) num_threads(nt)
    for (long long i = 0; i < static_cast<long long>(n); ++i) fn(static_cast<std::size_t>(i));
}

// Serial reference twin, kept for testing the parallel kernels against.
template <class Fn>
void serial_for(std::size_t n, const Fn& fn) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

} // namespace fsde
