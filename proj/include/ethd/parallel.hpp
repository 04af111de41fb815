#pragma once
#include <atomic>
#include <cstdint>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace ethd::parallel {

enum class Mode { Serial, OpenMP };

namespace detail {
inline std::atomic<Mode>& mode_flag() {
    static std::atomic<Mode> m{Mode::OpenMP};
    return m;
}
} // namespace detail

inline Mode mode() { return detail::mode_flag().load(std::memory_order_relaxed); }
inline void set_mode(Mode m) { detail::mode_flag().store(m, std::memory_order_relaxed); }

inline int max_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Runs body(i) for i in [0, n). Every grid kernel in this project derives an
// independent RNG stream per index and writes only its own output slot, so
// the OpenMP path produces bit-identical results to the serial reference
// path (which is kept selectable for tests and benchmarking).
//
// body must not throw: kernels record per-cell failures in their own slot.
template <typename F>
void for_index(std::int64_t n, F&& body) {
#if defined(_OPENMP)
    if (mode() == Mode::OpenMP) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

} // namespace ethd::parallel
