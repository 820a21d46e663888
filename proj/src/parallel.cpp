#include "hocd/parallel.hpp"

#include <atomic>
#include <cstdlib>

namespace hocd {

namespace {
std::atomic<bool> g_parallel{true};
}

bool parallel_enabled() {
    static const bool env_serial = [] {
        const char* v = std::getenv("HOCD_SERIAL");
        return v != nullptr && v[0] != '\0' && v[0] != '0';
    }();
    return !env_serial && g_parallel.load(std::memory_order_relaxed);
}

void set_parallel_enabled(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

int worker_count() {
#ifdef _OPENMP
    return parallel_enabled() ? omp_get_max_threads() : 1;
#else
    return 1;
#endif
}

}  // namespace hocd
