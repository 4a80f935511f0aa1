#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "dbs/common.hpp"

namespace dbs {

// Gauss-Legendre rule on [-1, 1]; nodes/weights computed once per order by
// Newton iteration on the Legendre polynomial and cached.
struct GaussRule {
  std::vector<double> nodes;    // ascending in (-1, 1)
  std::vector<double> weights;  // positive
};

// Supported orders: any n >= 2; callers use 16/32 for the doubling pair.
const GaussRule& gauss_rule(int n);

struct QuadOptions {
  double rel_tol = 1e-10;   // relative tolerance on each accepted panel
  double abs_floor = 1e-14; // scale below which "relative" stops shrinking
  int base_order = 16;      // accepted panel is the 2x-order evaluation
  int max_depth = 48;       // bisection depth cap before StepUnderflow
  double osc_scale = 0;     // if > 0, initial panels no wider than this
};

namespace detail {

template <class F>
auto gauss_panel(F&& f, double a, double b, int order) {
  const GaussRule& r = gauss_rule(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  using R = decltype(f(0.0));
  R sum{};
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    sum += r.weights[i] * f(mid + half * r.nodes[i]);
  return half * sum;
}

template <class F, class R>
void adapt(F& f, double a, double b, const QuadOptions& opt, double scale, int depth, R& total) {
  const R lo = gauss_panel(f, a, b, opt.base_order);
  const R hi = gauss_panel(f, a, b, 2 * opt.base_order);
  const double err = std::abs(hi - lo);
  const double tol = opt.rel_tol * std::max(scale, opt.abs_floor);
  if (err <= tol || std::abs(b - a) < 1e-15 * std::max(1.0, std::abs(a) + std::abs(b))) {
    total += hi;
    return;
  }
  if (depth >= opt.max_depth)
    throw Error(Errc::StepUnderflow, "quadrature bisection depth exceeded on panel");
  const double mid = 0.5 * (a + b);
  adapt(f, a, mid, opt, scale, depth + 1, total);
  adapt(f, mid, b, opt, scale, depth + 1, total);
}

}  // namespace detail

// Adaptive Gauss-Legendre integration of f over [a, b].  Each panel is
// accepted when the order-n and order-2n evaluations agree to rel_tol
// relative to a global scale estimate (a coarse whole-interval pass),
// otherwise the panel is bisected.  osc_scale seeds panels fine enough to
// resolve a known oscillation wavelength before adaptivity starts.
template <class F>
auto integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  using R = decltype(f(0.0));
  if (!(b > a)) return R{};

  int n0 = 1;
  if (opt.osc_scale > 0) {
    double panels = std::ceil((b - a) / opt.osc_scale);
    n0 = static_cast<int>(std::min(panels, 4096.0));
    if (n0 < 1) n0 = 1;
  }

  // Scale estimate: coarse pass over the seeded panels.
  double scale = 0;
  for (int i = 0; i < n0; ++i) {
    const double x0 = a + (b - a) * i / n0, x1 = a + (b - a) * (i + 1) / n0;
    scale += std::abs(detail::gauss_panel(f, x0, x1, opt.base_order));
  }

  R total{};
  for (int i = 0; i < n0; ++i) {
    const double x0 = a + (b - a) * i / n0, x1 = a + (b - a) * (i + 1) / n0;
    detail::adapt(f, x0, x1, opt, scale, 0, total);
  }
  return total;
}

}  // namespace dbs
