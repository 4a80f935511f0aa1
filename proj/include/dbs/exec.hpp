#pragma once

#include <cstddef>
#include <vector>

#include "dbs/common.hpp"

namespace dbs {

// Execution policy for batch operations.  Parallel paths must produce
// byte-identical results to the serial ones: each work item is computed
// independently into its own slot and any cross-item merging happens in a
// fixed serial order afterwards.
enum class Exec { Serial, Parallel };

// Thread cap: SAMPLER_THREADS env var if set (positive integer), otherwise
// the OpenMP default.  Returns 1 when built without OpenMP.
int max_threads();

// Runs f(i) for i in [0, n).  Exceptions thrown by work items are captured
// and the first one (lowest index) is rethrown after the loop completes.
template <class F>
void parallel_for(std::size_t n, Exec exec, F&& f);

namespace detail {
void run_parallel(std::size_t n, int threads, void* ctx, void (*call)(void*, std::size_t));
}

template <class F>
void parallel_for(std::size_t n, Exec exec, F&& f) {
  if (exec == Exec::Serial || n <= 1 || max_threads() <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  struct Ctx {
    F* fn;
    std::vector<std::exception_ptr> errs;
  } ctx{&f, std::vector<std::exception_ptr>(n)};
  detail::run_parallel(n, max_threads(), &ctx, [](void* p, std::size_t i) {
    auto* c = static_cast<Ctx*>(p);
    try {
      (*c->fn)(i);
    } catch (...) {
      c->errs[i] = std::current_exception();
    }
  });
  for (auto& e : ctx.errs)
    if (e) std::rethrow_exception(e);
}

// Deterministic pairwise (cascade) summation over a fixed index order.
// Used for reconstruction sums so serial and parallel term evaluation merge
// identically and digits are stable across runs.
template <class S>
S pairwise_sum(const std::vector<S>& v, std::size_t lo, std::size_t hi) {
  const std::size_t n = hi - lo;
  if (n == 0) return S{};
  if (n <= 4) {
    S s = v[lo];
    for (std::size_t i = lo + 1; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + n / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

template <class S>
S pairwise_sum(const std::vector<S>& v) {
  return pairwise_sum(v, 0, v.size());
}

}  // namespace dbs
