// Acceptance suite: ten numbered criteria, one [PASS]/[FAIL] line each,
// nonzero exit if any fail.  Each criterion states its tolerance inline.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "dbs/airy.hpp"
#include "dbs/exec.hpp"
#include "dbs/hamiltonian.hpp"
#include "dbs/kernels.hpp"
#include "dbs/quadrature.hpp"
#include "dbs/reconstruct.hpp"
#include "dbs/solver.hpp"
#include "dbs/spectrum.hpp"

using dbs::Complex;
using dbs::Exec;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;
Clock::time_point g_t0;

void begin() { g_t0 = Clock::now(); }

void report(int id, bool ok, const char* name, const std::string& detail) {
  const double secs = std::chrono::duration<double>(Clock::now() - g_t0).count();
  std::printf("[%s] criterion %2d: %-28s %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, name,
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// Least-squares slope of log(dev) against log(n).
double loglog_slope(const std::vector<double>& ns, const std::vector<double>& devs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(ns[i]), y = std::log(devs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// Octave-envelope fit: bin abscissae by octave, take per-bin maxima, then a
// log-log least-squares line through the bin (midpoint, max) pairs.  This
// ignores the oscillatory nulls of the terms and tracks their envelope.
double envelope_slope(const std::vector<double>& xs, const std::vector<double>& ts, double lo,
                      double hi) {
  std::vector<double> bx, bt;
  for (double edge = lo; edge < hi; edge *= 2) {
    const double top = std::min(edge * 2, hi);
    double best = 0, where = std::sqrt(edge * top);
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i] >= edge && xs[i] < top && ts[i] > best) best = ts[i];
    if (best > 0) {
      bx.push_back(where);
      bt.push_back(best);
    }
  }
  if (bx.size() < 2) return 0;
  return loglog_slope(bx, bt);
}

Complex conj_pair_form(const dbs::SymMat2& m, const dbs::Vec2c& u, const dbs::Vec2c& v) {
  const dbs::Vec2c uc{std::conj(u.x), std::conj(u.y)};
  return dbs::hform(m, uc, v);
}

// ---------------------------------------------------------------- criteria

// 1. Reproducing property: |<K_b(., w), F> - F(w)| < 1e-7 for kernel
// sections F, 20 random pairs, constant H with g0 in {0, 0.3}, b = 2.
void criterion1() {
  begin();
  bool ok = true;
  double worst = 0;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ure(-5.0, 5.0), uim(-1.0, 1.0);
  dbs::KernelOptions kopt;
  for (double g0 : {0.0, 0.3}) {
    const auto h = dbs::make_constant(g0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
      const Complex w(ure(rng), uim(rng)), wf(ure(rng), uim(rng));
      const dbs::ComplexSolution uw(h, std::conj(w)), uf(h, std::conj(wf));
      dbs::QuadOptions q;
      q.rel_tol = 1e-11;
      q.osc_scale = M_PI / (0.5 * (std::abs(w) + std::abs(wf)) + 1.0);
      const Complex ip = dbs::integrate(
          [&](double x) { return conj_pair_form(dbs::eval(h, x), uw.eval(x), uf.eval(x)); },
          0.0, 2.0, q);
      const Complex fw = dbs::reproducing_kernel(h, 2.0, w, wf, kopt);
      worst = std::max(worst, std::abs(ip - fw));
    }
  }
  ok = worst < 1e-7;
  report(1, ok, "reproducing property", fmt("max |<K,F> - F(w)| = %.2e (< 1e-7)", worst));
}

// 2. Sampling formula: critical-rate reconstruction of a kernel section,
// sup error < 1e-4 at N = 200 and halving as N doubles.
void criterion2() {
  begin();
  const auto h = dbs::make_constant(0.0, 0.15);
  dbs::SampleSource src{Complex(0.7, 0.3), 0.15};
  dbs::GridSpec grid;  // [-5,5]x[-1,1], 51x11
  const auto ref = dbs::reference_on_grid(h, src, grid, Exec::Parallel);
  dbs::ReconOptions ropt;
  ropt.mode = dbs::ReconMode::Sampling;
  ropt.exec = Exec::Parallel;
  dbs::SpectrumOptions sopt;
  sopt.exec = Exec::Parallel;

  double sup200 = 0, sup400 = 0;
  for (int N : {200, 400}) {
    const auto ev = dbs::eigenvalues(h, M_PI / 2, -N, N, sopt);
    const auto samples = dbs::make_samples(h, ev, src, 0.15, Exec::Parallel);
    const auto rec = dbs::reconstruct_on_grid(h, samples, grid, ropt);
    (N == 200 ? sup200 : sup400) = dbs::sup_abs_diff(rec, ref);
  }
  const bool ok = sup200 < 1e-4 && sup400 < 0.62 * sup200;
  report(2, ok, "sampling formula",
         fmt("sup N=200: %.2e (< 1e-4), N=400: %.2e (ratio %.2f)", sup200, sup400,
             sup400 / sup200));
}

// 3. Oversampling exactness: taper (0.8, 1.4, 2.0), sections of B_a,
// sup error < 1e-4 at N = 200.
void criterion3() {
  begin();
  const auto h = dbs::make_constant(0.0, 2.0);
  const dbs::Taper taper{0.8, 1.4};
  dbs::SpectrumOptions sopt;
  sopt.exec = Exec::Parallel;
  const auto ev = dbs::eigenvalues(h, M_PI / 2, -200, 200, sopt);
  dbs::GridSpec grid;
  dbs::ReconOptions ropt;
  ropt.mode = dbs::ReconMode::Oversampling;
  ropt.taper = taper;
  ropt.exec = Exec::Parallel;

  double worst = 0;
  for (const Complex w0 : {Complex(0.4, 0.2), Complex(-1.1, 0.5)}) {
    dbs::SampleSource src{w0, 0.8};
    const auto samples = dbs::make_samples(h, ev, src, 0.8, Exec::Parallel);
    const auto ref = dbs::reference_on_grid(h, src, grid, Exec::Parallel);
    const auto rec = dbs::reconstruct_on_grid(h, samples, grid, ropt);
    worst = std::max(worst, dbs::sup_abs_diff(rec, ref));
  }
  report(3, worst < 1e-4, "oversampling exactness", fmt("sup error = %.2e (< 1e-4)", worst));
}

// 4. Summability: q = 1 tail terms of the tapered kernel row decay with
// fitted exponent <= -1.8 over |lambda| in [50, 500]; partial sums Cauchy
// (tail beyond 500 under 1% of the total).
void criterion4() {
  begin();
  const auto h = dbs::make_constant(0.0, 2.0);
  dbs::SpectrumOptions sopt;
  sopt.exec = Exec::Parallel;
  const auto ev = dbs::eigenvalues(h, M_PI / 2, -640, 640, sopt);  // |lambda| <= ~2011
  dbs::SampleSet s;
  s.points = ev;
  s.values.assign(ev.size(), Complex(0));
  dbs::CoefficientKernel ck(h, s, dbs::ReconMode::Oversampling, dbs::Taper{0.8, 1.4},
                            dbs::KernelOptions{}, Exec::Parallel);
  const Complex zstar(1.3, 0.4);
  const auto row = ck.row(zstar);

  std::vector<double> abscissa, terms;
  double total = 0, tail = 0, inside = 0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const double t = std::abs(row[i]) / std::sqrt(ev[i].k_diag);
    const double a = std::abs(ev[i].lambda);
    abscissa.push_back(a);
    terms.push_back(t);
    total += t;
    (a > 500 ? tail : inside) += t;
  }
  const double slope = envelope_slope(abscissa, terms, 50.0, 500.0);
  const double frac = tail / total;
  const bool ok = slope <= -1.8 && frac < 0.01;
  report(4, ok, "summability of tails",
         fmt("envelope slope = %.2f (<= -1.8), tail fraction = %.3e (< 1e-2)", slope, frac));
}

// 5. Stability contrast: adversarial l_inf noise, eps = 0.1.  Oversampled
// error stays within C * eps with C moving < 5% from N = 200 to 400; plain
// sampling error strictly grows through N = 100, 200, 400.
void criterion5() {
  begin();
  const auto h = dbs::make_constant(0.0, 2.0);
  const dbs::Taper taper{0.8, 1.4};
  const double eps = 0.1;
  dbs::SampleSource src{Complex(0.4, 0.2), 0.8};
  dbs::GridSpec grid;
  dbs::SpectrumOptions sopt;
  sopt.exec = Exec::Parallel;
  const auto ev = dbs::eigenvalues(h, M_PI / 2, -400, 400, sopt);
  const auto full = dbs::make_samples(h, ev, src, 0.8, Exec::Parallel);
  const auto ref = dbs::reference_on_grid(h, src, grid, Exec::Parallel);
  const Complex z0(0.6, 0.0);

  dbs::ReconOptions plain;
  plain.mode = dbs::ReconMode::Sampling;
  plain.exec = Exec::Parallel;
  dbs::ReconOptions over;
  over.mode = dbs::ReconMode::Oversampling;
  over.taper = taper;
  over.exec = Exec::Parallel;

  std::vector<double> plain_err, over_err, over_bound;
  for (int N : {100, 200, 400}) {
    const auto s = dbs::truncate_samples(full, N);
    dbs::CoefficientKernel ck(h, s, dbs::ReconMode::Sampling, std::nullopt, plain.kernel,
                              Exec::Parallel);
    auto coeffs = ck.row(z0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] /= s.points[i].k_diag;
    dbs::NoiseSpec noise;
    noise.mode = dbs::NoiseMode::Adversarial;
    noise.eps = eps;
    const auto noisy = dbs::perturb(s, noise, &coeffs);

    plain_err.push_back(dbs::sup_abs_diff(dbs::reconstruct_on_grid(h, noisy, grid, plain), ref));
    over_err.push_back(dbs::sup_abs_diff(dbs::reconstruct_on_grid(h, noisy, grid, over), ref));
    over_bound.push_back(dbs::bound_constant(h, s, grid, over));
  }
  const bool grows = plain_err[0] < plain_err[1] && plain_err[1] < plain_err[2];
  bool bounded = true;
  for (std::size_t i = 0; i < over_err.size(); ++i)
    if (!(over_err[i] <= over_bound[i] * eps * 1.02 + 1e-4)) bounded = false;
  const double c_change = std::abs(over_bound[2] / over_bound[1] - 1.0);
  const bool ok = grows && bounded && c_change < 0.05;
  report(5, ok, "stability contrast",
         fmt("plain sup %.3f -> %.3f -> %.3f (grows), over sup <= C*eps (C: %.3f -> %.3f, "
             "change %.2e < 5e-2)",
             plain_err[0], plain_err[1], plain_err[2], over_bound[1], over_bound[2], c_change));
}

// 6. Zero asymptotics: relative deviation of refined zeros from the phase
// model decays with log-log slope <= -1.8 over n in [5, 50], for the wi
// table and for w_beta with beta = +-1.
void criterion6() {
  begin();
  bool ok = true;
  std::string detail;
  {
    const auto t = dbs::wi_zeros(50);
    std::vector<double> ns, devs;
    for (int n = 5; n <= 50; ++n) {
      ns.push_back(n);
      devs.push_back(std::abs(t.zeros[n - 1] - t.guesses[n - 1]) / t.zeros[n - 1]);
    }
    const double slope = loglog_slope(ns, devs);
    ok = ok && slope <= -1.8;
    detail += fmt("wi: %.2f ", slope);
  }
  for (double beta : {1.0, -1.0}) {
    const auto t = dbs::w_beta_zeros(beta, 51);
    std::vector<double> ns, devs;
    for (int n = 5; n <= 50; ++n) {
      ns.push_back(n);
      devs.push_back(std::abs(t.zeros[n] - t.guesses[n]) / t.zeros[n]);
    }
    const double slope = loglog_slope(ns, devs);
    ok = ok && slope <= -1.8;
    detail += fmt("beta=%+.0f: %.2f ", beta, slope);
  }
  report(6, ok, "zero asymptotics", detail + "(all <= -1.8)");
}

// 7. Norm asymptotics: ||u(lambda_n)||^2 over (2/3) b c0^2 ((3/2) pi n)^{1/3}
// stays in [0.98, 1.02] for n in [20, 100], gamma in {0, pi/2}.
void criterion7() {
  begin();
  const double b = 1.0;
  const double c0 = dbs::airy_c0();
  double lo = 1e9, hi = -1e9;
  for (double gamma : {0.0, M_PI / 2}) {
    const auto tbl = dbs::airy_spectrum(b, gamma, 20, 100);
    for (const auto& e : tbl) {
      const double model =
          (2.0 / 3.0) * b * c0 * c0 * std::cbrt(1.5 * M_PI * static_cast<double>(e.n));
      const double ratio = e.k_diag / model;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  const bool ok = lo >= 0.98 && hi <= 1.02;
  report(7, ok, "norm asymptotics", fmt("ratio range [%.4f, %.4f] within [0.98, 1.02]", lo, hi));
}

// Tapered kernel for the diag(1, x) system from the closed-form solutions
// (the generic stepped path would be needlessly slow at |lambda| ~ 2000).
Complex airy_oversampling_term(double b, const dbs::Taper& taper, Complex z, double lambda) {
  dbs::QuadOptions q;
  q.rel_tol = 1e-9;
  q.osc_scale = M_PI / ((std::abs(lambda) + std::abs(z)) * std::sqrt(taper.c) + 1.0);
  const Complex t = z - lambda;
  if (std::abs(t) < 1e-6) {
    // coincident limit: K_a(w, w) + tapered diagonal tail
    const double w = lambda;
    const auto ka = dbs::integrate(
        [&](double x) {
          const auto u = dbs::airy_solution(w, x);
          return u.x * u.x + x * u.y * u.y;
        },
        0.0, taper.a, q);
    const auto tailpart = dbs::integrate(
        [&](double x) {
          const auto u = dbs::airy_solution(w, x);
          return (taper.c - x) / (taper.c - taper.a) * (u.x * u.x + x * u.y * u.y);
        },
        taper.a, taper.c, q);
    return Complex(ka + tailpart, 0.0);
  }
  const Complex integral = dbs::integrate(
      [&](double x) {
        const auto uz = dbs::airy_solution(z, x);
        const auto ul = dbs::airy_solution(lambda, x);
        return uz.y * ul.x - uz.x * ul.y;  // jpair(u_z, u_lambda)
      },
      taper.a, taper.c, q);
  return integral / (t * (taper.c - taper.a));
}

// 8. Oversampling tails for diag(1, x): q = 1 terms decay with fitted
// exponent <= -1.3 in n; partial sums stabilize to < 1% tail by n = 200.
void criterion8() {
  begin();
  const double b = 1.0;
  const dbs::Taper taper{0.5, 0.8};
  const Complex zstar(0.45, 0.35);
  bool ok = true;
  std::string detail;
  for (double gamma : {0.0, M_PI / 4, M_PI / 2}) {
    const auto tbl = dbs::airy_spectrum(b, gamma, -400, 400);
    std::vector<double> ns(tbl.size()), terms(tbl.size());
    dbs::parallel_for(tbl.size(), Exec::Parallel, [&](std::size_t i) {
      const Complex j = airy_oversampling_term(b, taper, zstar, tbl[i].lambda);
      ns[i] = std::abs(static_cast<double>(tbl[i].n));
      terms[i] = std::abs(j) / std::sqrt(tbl[i].k_diag);
    });
    double total = 0, tail = 0;
    for (std::size_t i = 0; i < tbl.size(); ++i) {
      total += terms[i];
      if (std::abs(tbl[i].n) > 200) tail += terms[i];
    }
    const double slope = envelope_slope(ns, terms, 8.0, 400.0);
    const double frac = tail / total;
    ok = ok && slope <= -1.3 && frac < 0.01;
    detail += fmt("g=%.2f: slope %.2f frac %.1e; ", gamma, slope, frac);
  }
  report(8, ok, "diag(1,x) tail decay", detail + "(slope <= -1.3, frac < 1e-2)");
}

// 9. Oracle cross-validation: generic solver vs closed forms on diag(1, x).
// Eigenvalues to 1e-6 relative for |n| <= 30; solutions to 1e-8 at 100
// random (lambda, x).
void criterion9() {
  begin();
  const auto h = dbs::make_airy(1.0);
  const auto closed = dbs::airy_spectrum(1.0, M_PI / 2, -30, 30);
  dbs::SpectrumOptions sopt;
  sopt.with_k_diag = false;
  sopt.exec = Exec::Parallel;
  const auto generic = dbs::eigenvalues(h, M_PI / 2, -30, 30, sopt);
  double ev_dev = 0;
  for (std::size_t i = 0; i < closed.size(); ++i)
    ev_dev = std::max(ev_dev, std::abs(generic[i].lambda - closed[i].lambda) /
                                  std::max(1.0, std::abs(closed[i].lambda)));

  std::mt19937 rng(23);
  std::uniform_real_distribution<double> ulam(-50.0, 50.0), ux(0.05, 1.0);
  std::vector<std::pair<double, double>> pts(100);
  for (auto& p : pts) p = {ulam(rng), ux(rng)};
  std::vector<double> devs(pts.size());
  dbs::parallel_for(pts.size(), Exec::Parallel, [&](std::size_t i) {
    const auto [lam, x] = pts[i];
    const dbs::RealSolution sol(h, lam);
    const auto a = sol.eval(x);
    const auto c = dbs::airy_solution(lam, x);
    const double scale = std::max({1.0, std::abs(c.x), std::abs(c.y)});
    devs[i] = std::max(std::abs(a.x - c.x), std::abs(a.y - c.y)) / scale;
  });
  double sol_dev = 0;
  for (double d : devs) sol_dev = std::max(sol_dev, d);

  const bool ok = ev_dev < 1e-6 && sol_dev < 1e-8;
  report(9, ok, "solver cross-validation",
         fmt("eigenvalue rel dev %.2e (< 1e-6), solution dev %.2e (< 1e-8)", ev_dev, sol_dev));
}

// 10. Flat-model calibration: z-independent factor (variation < 1e-6) and a
// calibrated reconstruction of a flat-model kernel section to sup < 1e-4.
void criterion10() {
  begin();
  const double a = 0.4, b = 1.0;
  const auto cal = dbs::calibrate_pw_normalization(a, b);

  auto F = [&](Complex z) { return a * dbs::pw_g(a, z); };  // sin(a z) / z
  dbs::GridSpec grid;
  const auto zs = grid.points();
  double sup = 0;
  for (const auto& z : zs) {
    Complex rec = 0;
    for (int j = -200; j <= 200; ++j) {
      const double lam = j * M_PI / b;
      rec += dbs::pw_g_ab(a, b, z - lam) * F(Complex(lam, 0));
    }
    rec *= cal.factor;
    sup = std::max(sup, std::abs(rec - F(z)));
  }
  const bool ok = cal.variation < 1e-6 && sup < 1e-4;
  report(10, ok, "flat-model calibration",
         fmt("factor %.8f, variation %.1e (< 1e-6), recon sup %.2e (< 1e-4)", cal.factor,
             cal.variation, sup));
}

}  // namespace

int main() {
  std::printf("acceptance suite (threads: %d)\n", dbs::max_threads());
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (g_failures) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
