#include "dbs/exec.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dbs {

int max_threads() {
#ifdef _OPENMP
  static const int cached = [] {
    if (const char* env = std::getenv("SAMPLER_THREADS")) {
      try {
        int v = std::stoi(env);
        if (v > 0) return v;
      } catch (...) {
        // fall through to the OpenMP default on malformed input
      }
    }
    return omp_get_max_threads();
  }();
  return cached;
#else
  return 1;
#endif
}

namespace detail {

void run_parallel(std::size_t n, int threads, void* ctx, void (*call)(void*, std::size_t)) {
#ifdef _OPENMP
  const long long m = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long long i = 0; i < m; ++i) call(ctx, static_cast<std::size_t>(i));
#else
  (void)threads;
  for (std::size_t i = 0; i < n; ++i) call(ctx, i);
#endif
}

}  // namespace detail
}  // namespace dbs
