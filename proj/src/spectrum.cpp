#include "dbs/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace dbs {

std::optional<double> detect_exceptional(const Hamiltonian& h) {
  const auto intervals = detect_singular_intervals(h);
  if (intervals.empty()) return std::nullopt;
  const auto& last = intervals.back();
  if (std::abs(last.to - h.b()) > 1e-12 * std::max(1.0, h.b())) return std::nullopt;
  double omega = last.phi + M_PI / 2;
  omega = std::fmod(omega, M_PI);
  if (omega < 0) omega += M_PI;
  return omega;
}

namespace {

double solve_one(const Hamiltonian& h, double gamma, long long n, double type,
                 const SolverOptions& sopt) {
  const double target = gamma + n * M_PI;
  // Phase continuation rather than prufer_theta: same function on diagonal
  // weights, and it extends enumeration to general symmetric ones.
  auto theta = [&](double lam) { return detail::phase_continuation(h, lam, h.b(), sopt); };

  if (target == 0.0) return 0.0;  // theta(0, b) = 0 identically

  // Phase grows like lambda * type with a bounded correction, so seed the
  // bracket around target / type and widen geometrically.
  double guess = target / std::max(type, 1e-300);
  double half = std::max(M_PI / std::max(type, 1e-300), 0.25 * std::abs(guess));
  double lo = guess - half, hi = guess + half;
  double flo = theta(lo) - target, fhi = theta(hi) - target;
  int expand = 0;
  while (flo > 0 || fhi < 0) {
    if (++expand > 60)
      throw Error(Errc::MonotonicityFailure,
                  "failed to bracket the phase target; phase not increasing as expected");
    half *= 2;
    if (flo > 0) {
      lo = guess - half;
      flo = theta(lo) - target;
    }
    if (fhi < 0) {
      hi = guess + half;
      fhi = theta(hi) - target;
    }
  }

  // Bisection to a narrow interval, then a couple of secant polishes.
  for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = theta(mid) - target;
    if (fm < 0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  double a = lo, b = hi, fa = flo, fb = fhi;
  double best = 0.5 * (lo + hi);
  for (int it = 0; it < 2; ++it) {
    if (fb == fa) break;
    const double c = b - fb * (b - a) / (fb - fa);
    if (!(c > lo && c < hi)) break;
    const double fc = theta(c) - target;
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    best = c;
    if (fc == 0) break;
  }
  return best;
}

}  // namespace

std::vector<Eigenvalue> eigenvalues(const Hamiltonian& h, double gamma, long long n_min,
                                    long long n_max, const SpectrumOptions& opt) {
  if (!(gamma >= 0 && gamma < M_PI))
    throw Error(Errc::ConfigError, "extension angle must lie in [0, pi)");
  if (n_min > n_max) throw Error(Errc::ConfigError, "empty index range");
  validate(h);

  if (const auto omega = detect_exceptional(h)) {
    double d = std::fmod(std::abs(gamma - *omega), M_PI);
    d = std::min(d, M_PI - d);
    if (d < 1e-8)
      throw Error(Errc::ExceptionalExtension,
                  "boundary angle coincides with the singular terminal direction");
  }

  const double type = exponential_type(h, h.b());
  if (!(type > 0))
    throw Error(Errc::EmptyDomain, "exponential type is zero; spectrum is not discrete-regular");

  const std::size_t count = static_cast<std::size_t>(n_max - n_min + 1);
  std::vector<Eigenvalue> out(count);
  parallel_for(count, opt.exec, [&](std::size_t i) {
    const long long n = n_min + static_cast<long long>(i);
    Eigenvalue ev;
    ev.n = n;
    ev.lambda = solve_one(h, gamma, n, type, opt.solver);
    if (opt.with_k_diag) {
      NormOptions nopt;
      nopt.tol_quad = opt.tol_quad;
      nopt.solver = opt.solver;
      ev.k_diag = norm_squared(h, ev.lambda, h.b(), nopt);
    }
    out[i] = ev;
  });

  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i].lambda > out[i - 1].lambda))
      throw Error(Errc::MonotonicityFailure, "eigenvalue sequence is not strictly increasing");
  return out;
}

CountingFit counting_check(const std::vector<Eigenvalue>& table, double exponential_type) {
  if (table.size() < 2) throw Error(Errc::ConfigError, "counting fit needs at least two points");
  double sn = 0, sl = 0, snn = 0, snl = 0;
  const double m = static_cast<double>(table.size());
  for (const auto& e : table) {
    const double n = static_cast<double>(e.n);
    sn += n;
    sl += e.lambda;
    snn += n * n;
    snl += n * e.lambda;
  }
  CountingFit fit;
  const double denom = m * snn - sn * sn;
  fit.slope = (m * snl - sn * sl) / denom;
  fit.intercept = (sl - fit.slope * sn) / m;
  fit.slope_model = M_PI / exponential_type;
  fit.slope_rel_dev = std::abs(fit.slope - fit.slope_model) / fit.slope_model;
  for (const auto& e : table)
    fit.max_abs_residual = std::max(
        fit.max_abs_residual,
        std::abs(e.lambda - (fit.slope * static_cast<double>(e.n) + fit.intercept)));
  return fit;
}

}  // namespace dbs
