#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dbs/common.hpp"
#include "dbs/hamiltonian.hpp"

namespace dbs {

// Propagation method for non-closed-form segments.  CF4 is the default: a
// fourth-order commutator-free two-exponential scheme using the two-point
// Gauss nodes.  Midpoint is the second-order single-exponential rule kept as
// the serial reference implementation.
enum class Method { CF4, Midpoint };

struct SolverOptions {
  double tol_ode = 1e-10;  // relative endpoint tolerance per segment
  Method method = Method::CF4;
  int max_step_doublings = 22;  // step counts up to ~4M per segment
};

// exp(A) for a traceless 2x2 matrix A:  exp(A) = cosh(mu) I + sinhc(mu) A
// with mu^2 = -det A.  Both cosh(sqrt(w)) and sinh(sqrt(w))/sqrt(w) are
// entire in w, so no branch choice is needed; small |w| uses the series.
template <class S>
Mat2T<S> expm_traceless(const Mat2T<S>& a) {
  const S w = -a.det();
  S ch, shc;
  if (std::abs(w) < 1e-8) {
    ch = S(1) + w * (S(1) / 2.0 + w * (S(1) / 24.0 + w / 720.0));
    shc = S(1) + w * (S(1) / 6.0 + w * (S(1) / 120.0 + w / 5040.0));
  } else if constexpr (std::is_same_v<S, double>) {
    if (w > 0) {
      const double m = std::sqrt(w);
      ch = std::cosh(m);
      shc = std::sinh(m) / m;
    } else {
      const double m = std::sqrt(-w);
      ch = std::cos(m);
      shc = std::sin(m) / m;
    }
  } else {
    const S m = std::sqrt(w);
    ch = std::cosh(m);
    shc = std::sinh(m) / m;
  }
  return {ch + shc * a.a, shc * a.b, shc * a.c, ch + shc * a.d};
}

namespace detail {

// One CF4 step across [x0, x0 + h] for u' = z J H(x) u.  The two factors
// are weighted combinations of z J H at the Gauss nodes; each combination is
// again z J (symmetric), hence traceless, so the closed-form exponential
// applies.  The heavier weight on the early node belongs to the factor that
// is applied first.
template <class S, class HEval>
Mat2T<S> cf4_step(const HEval& heval, S z, double x0, double h) {
  constexpr double kNode = 0.2886751345948128823;  // sqrt(3)/6
  const SymMat2 h1 = heval(x0 + (0.5 - kNode) * h);
  const SymMat2 h2 = heval(x0 + (0.5 + kNode) * h);
  constexpr double wp = 0.25 + kNode, wm = 0.25 - kNode;
  const SymMat2 first{wp * h1.h1 + wm * h2.h1, wp * h1.h2 + wm * h2.h2, wp * h1.h3 + wm * h2.h3};
  const SymMat2 second{wm * h1.h1 + wp * h2.h1, wm * h1.h2 + wp * h2.h2, wm * h1.h3 + wp * h2.h3};
  return expm_traceless(jmul(second, z * h)) * expm_traceless(jmul(first, z * h));
}

template <class S, class HEval>
Mat2T<S> midpoint_step(const HEval& heval, S z, double x0, double h) {
  return expm_traceless(jmul(heval(x0 + 0.5 * h), z * h));
}

}  // namespace detail

// Fundamental solution u(z, x) of J u' = -z H u with u(z, 0) = (1, 0)^T,
// i.e. u' = z J H u.  Built once per (H, z); eval(x) is then cheap anywhere
// in [0, b].  Segments with constant H (ConstantDiagonal, SingularSegment)
// propagate by a single exact exponential; other segments are stepped with
// the selected method, doubling the step count until the segment endpoint
// value settles to tol_ode (relative), else StepUnderflow.
template <class S>
class Solution {
 public:
  explicit Solution(const Hamiltonian& h, S z, SolverOptions opt = {},
                    Vec2T<S> u0 = {S(1), S(0)})
      : ham_(h), z_(z), opt_(opt), u_init_(u0) {
    if (h.segments.empty() || !(h.b() > 0))
      throw Error(Errc::EmptyDomain, "fundamental solution requires b > 0");
    build();
  }

  S z() const { return z_; }
  double b() const { return ham_.b(); }

  Vec2T<S> eval(double x) const {
    x = std::clamp(x, 0.0, b());
    // locate segment: first plan whose 'to' is >= x
    std::size_t i = 0;
    while (i + 1 < plans_.size() && x > plans_[i].to) ++i;
    const Plan& p = plans_[i];
    if (p.closed) {
      const Segment& s = ham_.segments[i];
      return expm_traceless(jmul(eval_segment(s, s.from), z_ * (x - p.from))) * p.u0;
    }
    // checkpointed: partial step from the last checkpoint at or below x
    const double hstep = (p.to - p.from) / p.n;
    std::size_t k = static_cast<std::size_t>(std::floor((x - p.from) / hstep));
    if (k >= p.us.size()) k = p.us.size() - 1;
    double xk = p.from + k * hstep;
    if (xk > x && k > 0) {
      --k;
      xk = p.from + k * hstep;
    }
    const double dx = x - xk;
    if (dx <= 0) return p.us[k];
    const auto& seg = ham_.segments[i];
    auto he = [&](double t) { return eval_segment(seg, t); };
    const Mat2T<S> e = (opt_.method == Method::CF4) ? detail::cf4_step(he, z_, xk, dx)
                                                    : detail::midpoint_step(he, z_, xk, dx);
    return e * p.us[k];
  }

  Vec2T<S> end() const { return u_end_; }

  // Checkpoint spacing of the plan covering x (used by the phase walker).
  double checkpoint_spacing(std::size_t seg_index) const {
    const Plan& p = plans_[seg_index];
    return p.closed ? (p.to - p.from) : (p.to - p.from) / p.n;
  }

 private:
  struct Plan {
    double from = 0, to = 0;
    bool closed = false;
    int n = 0;                  // steps for non-closed plans
    Vec2T<S> u0;                // value at 'from'
    std::vector<Vec2T<S>> us;   // checkpoints at from + k*(to-from)/n, k=0..n
  };

  static double norm2(const Vec2T<S>& v) {
    return std::sqrt(std::abs(v.x) * std::abs(v.x) + std::abs(v.y) * std::abs(v.y));
  }

  void build() {
    Vec2T<S> u = u_init_;
    for (const auto& s : ham_.segments) {
      Plan p;
      p.from = s.from;
      p.to = s.to;
      p.u0 = u;
      if (std::holds_alternative<ConstantDiagonal>(s.data) ||
          std::holds_alternative<SingularSegment>(s.data)) {
        p.closed = true;
        u = expm_traceless(jmul(eval_segment(s, s.from), z_ * (s.to - s.from))) * u;
      } else {
        stepped_plan(s, u, p);
        u = p.us.back();
      }
      plans_.push_back(std::move(p));
    }
    u_end_ = u;
  }

  void stepped_plan(const Segment& s, const Vec2T<S>& u0, Plan& p) {
    const double len = s.to - s.from;
    auto he = [&](double t) { return eval_segment(s, t); };
    double trmax = 0;
    for (int k = 0; k <= 16; ++k)
      trmax = std::max(trmax, eval_segment(s, s.from + len * k / 16.0).trace());
    // Seed so each step carries a modest phase; also keeps consecutive
    // checkpoints within half a rotation for the phase unwrapping below.
    const double zmag = std::abs(z_);
    int n = static_cast<int>(std::min(1.0e6, std::ceil(len * (zmag * trmax * 0.5 + 4.0))));
    n = std::max(n, 4);

    auto run = [&](int steps, std::vector<Vec2T<S>>* keep) {
      Vec2T<S> u = u0;
      const double hstep = len / steps;
      if (keep) {
        keep->clear();
        keep->reserve(steps + 1);
        keep->push_back(u);
      }
      for (int k = 0; k < steps; ++k) {
        const double xk = s.from + k * hstep;
        const Mat2T<S> e = (opt_.method == Method::CF4)
                               ? detail::cf4_step(he, z_, xk, hstep)
                               : detail::midpoint_step(he, z_, xk, hstep);
        u = e * u;
        if (keep) keep->push_back(u);
      }
      return u;
    };

    Vec2T<S> prev = run(n, nullptr);
    for (int d = 0; d <= opt_.max_step_doublings; ++d) {
      const int n2 = 2 * n;
      Vec2T<S> cur = run(n2, nullptr);
      const double diff = norm2({cur.x - prev.x, cur.y - prev.y});
      const double scale = std::max(1.0, norm2(cur));
      if (diff <= opt_.tol_ode * scale) {
        p.n = n2;
        run(n2, &p.us);
        return;
      }
      n = n2;
      prev = cur;
    }
    throw Error(Errc::StepUnderflow, "step doubling failed to reach tolerance on segment");
  }

  const Hamiltonian ham_;  // owned copy: Solution outlives caller temporaries
  S z_;
  SolverOptions opt_;
  Vec2T<S> u_init_;
  std::vector<Plan> plans_;
  Vec2T<S> u_end_;
};

using RealSolution = Solution<double>;
using ComplexSolution = Solution<Complex>;

// Determinant of the transfer matrix at x.  The coefficient matrix z J H is
// traceless, so this is identically 1; exposed for invariant tests.
template <class S>
S transfer_determinant(const Hamiltonian& h, S z, double x, SolverOptions opt = {}) {
  Solution<S> c1(h, z, opt, {S(1), S(0)});
  Solution<S> c2(h, z, opt, {S(0), S(1)});
  const Vec2T<S> a = c1.eval(x), b = c2.eval(x);
  return a.x * b.y - a.y * b.x;
}

// Prufer phase theta(lambda, x) for diagonal H: u = R (cos theta, sin theta),
// theta(0) = 0, continuous in x.  Throws NonDiagonalHamiltonian otherwise.
double prufer_theta(const Hamiltonian& h, double lambda, double x, SolverOptions opt = {});

namespace detail {
// Continuous-argument continuation of the computed solution u(lambda, .);
// coincides with prufer_theta on diagonal H but is defined for any valid
// weight.  Backs the general-weight eigenvalue enumeration (the boundary
// direction hits gamma + n*pi exactly at the n-th eigenvalue).
double phase_continuation(const Hamiltonian& h, double lambda, double x,
                          const SolverOptions& opt);
}  // namespace detail

struct NormOptions {
  double tol_quad = 1e-10;
  bool cross_check = true;       // Wronskian-limit comparison
  double cross_check_tol = 1e-6;
  SolverOptions solver;
};

// Squared H-weighted norm of u(lambda, .) over [0, l]:
// integral of u^T H u.  With cross_check, also evaluates the coincident-
// point kernel limit via a central difference of the J-pairing quotient and
// throws FormMismatch when the two disagree.
double norm_squared(const Hamiltonian& h, double lambda, double l, NormOptions opt = {});

}  // namespace dbs
