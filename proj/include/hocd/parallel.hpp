#ifndef HOCD_PARALLEL_HPP
#define HOCD_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hocd {

// Process-wide switch between the OpenMP kernels and the serial reference
// path. Every parallel loop writes into preallocated per-index slots and all
// floating-point reductions happen serially afterwards, so both paths produce
// bit-identical results; the tests assert this.
bool parallel_enabled();
void set_parallel_enabled(bool on);
int worker_count();

template <class F>
void parallel_for(std::size_t n, F&& body) {
#ifdef _OPENMP
    if (parallel_enabled() && n > 1) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            body(static_cast<std::size_t>(i));
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace hocd

#endif
