#include "dbs/solver.hpp"

#include "dbs/quadrature.hpp"

namespace dbs {

namespace {

// Monotone phase map T_beta with tan(theta) = beta * tan(psi), fixing every
// multiple of pi and preserving the quadrant family.  This is the exact
// Prufer phase transport for a constant diagonal weight.
double tmap(double psi, double beta) {
  const double k = std::floor(psi / M_PI + 0.5);
  const double r = psi - k * M_PI;
  return k * M_PI + std::atan(beta * std::tan(r));
}

double principal(double d) {
  d = std::fmod(d, 2 * M_PI);
  if (d > M_PI) d -= 2 * M_PI;
  if (d <= -M_PI) d += 2 * M_PI;
  return d;
}

double segment_trace_max(const Segment& s) {
  double trmax = 0;
  for (int k = 0; k <= 16; ++k) {
    const double x = s.from + (s.to - s.from) * k / 16.0;
    trmax = std::max(trmax, eval_segment(s, x).trace());
  }
  return trmax;
}

}  // namespace

double prufer_theta(const Hamiltonian& h, double lambda, double x, SolverOptions opt) {
  const ValidationReport rep = validate(h);
  if (!rep.diagonal)
    throw Error(Errc::NonDiagonalHamiltonian, "phase flow requires a diagonal weight matrix");
  return detail::phase_continuation(h, lambda, x, opt);
}

double detail::phase_continuation(const Hamiltonian& h, double lambda, double x,
                                  const SolverOptions& opt) {
  x = std::clamp(x, 0.0, h.b());
  if (x <= 0) return 0.0;

  RealSolution sol(h, lambda, opt);

  double theta = 0;
  for (std::size_t i = 0; i < h.segments.size(); ++i) {
    const Segment& s = h.segments[i];
    if (s.from >= x) break;
    const double hi = std::min(s.to, x);
    const double len = hi - s.from;

    if (const auto* c = std::get_if<ConstantDiagonal>(&s.data)) {
      const double h1 = 0.5 + c->g0, h2 = 0.5 - c->g0;
      if (h1 * h2 > 1e-14) {
        const double beta = std::sqrt(h1 / h2);
        const double omega = lambda * std::sqrt(h1 * h2);
        theta = tmap(tmap(theta, 1.0 / beta) + omega * len, beta);
        continue;
      }
    }

    // Walk the solution through the segment, accumulating principal-value
    // phase increments.  Point density keeps each increment well under pi:
    // the phase rate is bounded by |lambda| * trace(H).
    int npts;
    const double spacing_plan = sol.checkpoint_spacing(i);
    const double trmax = segment_trace_max(s);
    const double cap = M_PI / (2.0 * (std::abs(lambda) * trmax + 1.0));
    const double spacing = std::min(spacing_plan, cap);
    npts = static_cast<int>(std::ceil(len / spacing)) + 1;
    npts = std::max(npts, 2);

    Vec2 u = sol.eval(s.from);
    double raw_prev = std::atan2(u.y, u.x);
    for (int k = 1; k < npts; ++k) {
      const double xk = s.from + len * k / (npts - 1);
      u = sol.eval(xk);
      const double raw = std::atan2(u.y, u.x);
      theta += principal(raw - raw_prev);
      raw_prev = raw;
    }
  }
  return theta;
}

double norm_squared(const Hamiltonian& h, double lambda, double l, NormOptions opt) {
  if (!(l > 0)) throw Error(Errc::EmptyDomain, "norm over an empty interval");
  if (l > h.b() + 1e-9 * std::max(1.0, h.b()))
    throw Error(Errc::SubspaceMismatch, "norm interval exceeds the domain endpoint");
  l = std::min(l, h.b());

  RealSolution sol(h, lambda, opt.solver);
  double trmax = 0;
  for (int k = 0; k <= 64; ++k)
    trmax = std::max(trmax, eval(h, l * k / 64.0).trace());

  QuadOptions q;
  q.rel_tol = opt.tol_quad;
  q.osc_scale = M_PI / (std::abs(lambda) * trmax + 1.0);
  const double quad = integrate(
      [&](double t) {
        const Vec2 u = sol.eval(t);
        return hform(eval(h, t), u, u);
      },
      0.0, l, q);

  if (opt.cross_check) {
    // Coincident-point limit of the pairing quotient: the z-derivative of
    // jpair(u(z, l), u(lambda, l)) at z = lambda, by central difference.
    // The pairing oscillates in z at the exponential-type rate (uniformly in
    // lambda, by Bernstein), so the step is scaled by the type, keeping the
    // O(delta^2) truncation error below the comparison tolerance for every
    // eigenvalue.
    const double delta = 1e-3 / std::max(1.0, exponential_type(h, l));
    RealSolution up(h, lambda + delta, opt.solver);
    RealSolution um(h, lambda - delta, opt.solver);
    const Vec2 ul = sol.eval(l);
    const double west = (jpair(up.eval(l), ul) - jpair(um.eval(l), ul)) / (2 * delta);
    if (std::abs(west - quad) > opt.cross_check_tol * std::max(std::abs(quad), 1e-12))
      throw Error(Errc::FormMismatch,
                  "quadrature norm and coincident-limit evaluation disagree");
  }
  return quad;
}

}  // namespace dbs
