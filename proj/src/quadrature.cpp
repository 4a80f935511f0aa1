#include "dbs/quadrature.hpp"

#include <map>
#include <mutex>

namespace dbs {

namespace {

// Nodes = roots of P_n found by Newton from the Chebyshev-like initial
// guess; weights w_i = 2 / ((1 - x_i^2) P_n'(x_i)^2).
GaussRule make_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      // Evaluate P_n and P_n' by the three-term recurrence.
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1 - x * x) * dp * dp);
    // cos gives the positive-half roots in descending order; mirror them.
    r.nodes[i] = -x;
    r.weights[i] = w;
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
  return it->second;
}

}  // namespace dbs
