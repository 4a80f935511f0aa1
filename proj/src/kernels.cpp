#include "dbs/kernels.hpp"

#include <cmath>

#include "dbs/quadrature.hpp"

namespace dbs {

namespace {

const ConstantDiagonal* single_constant(const Hamiltonian& h) {
  if (h.segments.size() != 1) return nullptr;
  return std::get_if<ConstantDiagonal>(&h.segments.front().data);
}

double kappa_max(const Hamiltonian& h) {
  double k = 0;
  for (const auto& s : h.segments)
    for (int j = 0; j <= 16; ++j) {
      const double x = s.from + (s.to - s.from) * j / 16.0;
      k = std::max(k, std::sqrt(std::max(eval_segment(s, x).det(), 0.0)));
    }
  return k;
}

// Oscillation wavelength seed for kernel integrands: the J-pairing of two
// solutions holds frequencies up to kappa (|z| + |w|), so resolve that.
double osc_seed(const Hamiltonian& h, Complex z, Complex w) {
  return M_PI / (kappa_max(h) * (std::abs(z) + std::abs(w)) + 1.0);
}

Vec2c to_complex(const Vec2& v) { return {Complex(v.x, 0.0), Complex(v.y, 0.0)}; }

void check_taper(const Hamiltonian& h, const Taper& t) {
  if (!(t.a > 0) || !(t.c > t.a) || t.c > h.b() + 1e-12 * std::max(1.0, h.b()))
    throw Error(Errc::ConfigError, "taper requires 0 < a < c <= b");
}

// Closed forms for a single constant-diagonal segment:
// u(z, x) = (cos(z kappa x), alpha sin(z kappa x)), alpha = sqrt(h1/h2),
// kappa = sqrt(h1 h2); the pairing is jpair = alpha sin(kappa t x).
struct ConstantForms {
  double alpha, kappa;
  explicit ConstantForms(double g0)
      : alpha(std::sqrt((0.5 + g0) / (0.5 - g0))), kappa(std::sqrt(0.25 - g0 * g0)) {}

  Complex reproducing(double l, Complex t) const {
    // alpha sin(kappa t l)/t = alpha kappa l sinc(kappa t l)
    return alpha * kappa * l * csinc(kappa * t * l);
  }
  Complex oversampling(const Taper& tp, Complex t) const {
    const Complex p = kappa * t * (tp.c + tp.a) / 2.0;
    const Complex q = kappa * t * (tp.c - tp.a) / 2.0;
    return alpha * csinc(p) * csinc(q) * kappa * (tp.a + tp.c) / 2.0;
  }
};

}  // namespace

Complex csinc(Complex x) {
  if (std::abs(x) < 1e-4) {
    const Complex x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

Complex pw_g(double a, Complex t) { return csinc(a * t); }

Complex pw_g_ab(double a, double b, Complex t) {
  return (a + b) * csinc(t * (a + b) / 2.0) * csinc(t * (b - a) / 2.0);
}

namespace {

Complex reproducing_direct(const Hamiltonian& h, double l, const ComplexSolution& uz,
                           Complex wbar, const ComplexSolution& uw,
                           const KernelOptions& opt) {
  QuadOptions q;
  q.rel_tol = opt.tol_quad;
  q.osc_scale = osc_seed(h, uz.z(), wbar);
  return integrate(
      [&](double x) { return hform(eval(h, x), uz.eval(x), uw.eval(x)); }, 0.0, l, q);
}

Complex oversampling_direct(const Hamiltonian& h, const Taper& tp, const ComplexSolution& uz,
                            Complex wbar, const ComplexSolution& uw,
                            const KernelOptions& opt) {
  // K_a + the tapered remainder over [a, c].
  QuadOptions q;
  q.rel_tol = opt.tol_quad;
  q.osc_scale = osc_seed(h, uz.z(), wbar);
  const Complex ka = reproducing_direct(h, tp.a, uz, wbar, uw, opt);
  const Complex tail = integrate(
      [&](double x) {
        const double omega = (tp.c - x) / (tp.c - tp.a);
        return omega * hform(eval(h, x), uz.eval(x), uw.eval(x));
      },
      tp.a, tp.c, q);
  return ka + tail;
}

Complex reproducing_quotient(const ComplexSolution& uz, Complex wbar,
                             const ComplexSolution& uw, double l, Complex t) {
  return jpair(uz.eval(l), uw.eval(l)) / t;
}

Complex oversampling_quotient(const Hamiltonian& h, const Taper& tp, const ComplexSolution& uz,
                              Complex wbar, const ComplexSolution& uw, Complex t,
                              const KernelOptions& opt) {
  QuadOptions q;
  q.rel_tol = opt.tol_quad;
  q.osc_scale = M_PI / (kappa_max(h) * std::abs(t) + 1.0);
  const Complex integral = integrate(
      [&](double x) { return jpair(uz.eval(x), uw.eval(x)); }, tp.a, tp.c, q);
  return integral / (t * (tp.c - tp.a));
}

}  // namespace

Complex reproducing_kernel(const Hamiltonian& h, double l, Complex z, Complex w,
                           const KernelOptions& opt) {
  if (!(l > 0)) throw Error(Errc::EmptyDomain, "kernel subspace requires l > 0");
  if (l > h.b() + 1e-12 * std::max(1.0, h.b()))
    throw Error(Errc::SubspaceMismatch, "kernel subspace bound exceeds the domain");
  const Complex wbar = std::conj(w);
  const Complex t = z - wbar;

  if (opt.allow_closed) {
    if (const auto* c = single_constant(h)) {
      ConstantForms f(c->g0);
      return f.reproducing(l, t);
    }
  }

  ComplexSolution uz(h, z, opt.solver);
  ComplexSolution uw(h, wbar, opt.solver);
  if (std::abs(t) <= opt.tol_coincide) return reproducing_direct(h, l, uz, wbar, uw, opt);
  const Complex quo = reproducing_quotient(uz, wbar, uw, l, t);
  if (opt.cross_check) {
    const Complex dir = reproducing_direct(h, l, uz, wbar, uw, opt);
    if (std::abs(quo - dir) > opt.cross_check_tol * std::max(std::abs(dir), 1e-12))
      throw Error(Errc::CoincidenceInstability,
                  "quotient and direct kernel forms disagree beyond tolerance");
  }
  return quo;
}

Complex oversampling_kernel(const Hamiltonian& h, const Taper& taper, Complex z, Complex w,
                            const KernelOptions& opt) {
  check_taper(h, taper);
  const Complex wbar = std::conj(w);
  const Complex t = z - wbar;

  if (opt.allow_closed) {
    if (const auto* c = single_constant(h)) {
      ConstantForms f(c->g0);
      return f.oversampling(taper, t);
    }
  }

  ComplexSolution uz(h, z, opt.solver);
  ComplexSolution uw(h, wbar, opt.solver);
  if (std::abs(t) <= opt.tol_coincide)
    return oversampling_direct(h, taper, uz, wbar, uw, opt);
  const Complex quo = oversampling_quotient(h, taper, uz, wbar, uw, t, opt);
  if (opt.cross_check) {
    const Complex dir = oversampling_direct(h, taper, uz, wbar, uw, opt);
    if (std::abs(quo - dir) > opt.cross_check_tol * std::max(std::abs(dir), 1e-12))
      throw Error(Errc::CoincidenceInstability,
                  "quotient and direct kernel forms disagree beyond tolerance");
  }
  return quo;
}

Complex reproducing_kernel_from(const Hamiltonian& h, double l, const ComplexSolution& uz,
                                const RealSolution& ulam, const KernelOptions& opt) {
  const double lambda = ulam.z();
  const Complex t = uz.z() - lambda;
  if (std::abs(t) > opt.tol_coincide) {
    const Vec2c a = uz.eval(l);
    const Vec2c b = to_complex(ulam.eval(l));
    return jpair(a, b) / t;
  }
  QuadOptions q;
  q.rel_tol = opt.tol_quad;
  q.osc_scale = osc_seed(h, uz.z(), Complex(lambda, 0));
  return integrate(
      [&](double x) { return hform(eval(h, x), uz.eval(x), to_complex(ulam.eval(x))); }, 0.0,
      l, q);
}

Complex oversampling_kernel_from(const Hamiltonian& h, const Taper& taper,
                                 const ComplexSolution& uz, const RealSolution& ulam,
                                 const KernelOptions& opt) {
  check_taper(h, taper);
  const double lambda = ulam.z();
  const Complex t = uz.z() - lambda;
  if (std::abs(t) > opt.tol_coincide) {
    QuadOptions q;
    q.rel_tol = opt.tol_quad;
    q.osc_scale = M_PI / (kappa_max(h) * std::abs(t) + 1.0);
    const Complex integral = integrate(
        [&](double x) { return jpair(uz.eval(x), to_complex(ulam.eval(x))); }, taper.a,
        taper.c, q);
    return integral / (t * (taper.c - taper.a));
  }
  QuadOptions q;
  q.rel_tol = opt.tol_quad;
  q.osc_scale = osc_seed(h, uz.z(), Complex(lambda, 0));
  const Complex ka = integrate(
      [&](double x) { return hform(eval(h, x), uz.eval(x), to_complex(ulam.eval(x))); }, 0.0,
      taper.a, q);
  const Complex tail = integrate(
      [&](double x) {
        const double omega = (taper.c - x) / (taper.c - taper.a);
        return omega * hform(eval(h, x), uz.eval(x), to_complex(ulam.eval(x)));
      },
      taper.a, taper.c, q);
  return ka + tail;
}

CalibrationResult calibrate_pw_normalization(double a_pw, double b_pw, double ratio_tol) {
  if (!(a_pw > 0) || !(b_pw > a_pw))
    throw Error(Errc::ConfigError, "calibration requires 0 < a < b");

  const Hamiltonian h = make_constant(0.0, 2.0 * b_pw);
  const Taper taper{2.0 * a_pw, 2.0 * b_pw};
  KernelOptions kopt;
  kopt.allow_closed = false;  // measure through the generic integration path

  CalibrationResult res;
  res.a = a_pw;
  res.b = b_pw;
  double sum = 0, mn = 0, mx = 0;
  int used = 0;

  // Sample points lambda_j = j pi / b_pw and a 10x10 z-grid avoiding the
  // real axis (where z could collide with a sample point).
  std::vector<double> lambdas;
  for (int j = -3; j <= 3; ++j) lambdas.push_back(j * M_PI / b_pw);

  for (double lam : lambdas) {
    RealSolution ulam(h, lam);
    NormOptions nopt;
    const double kdiag = norm_squared(h, lam, h.b(), nopt);
    for (int i = 0; i < 10; ++i) {
      for (int jj = 0; jj < 10; ++jj) {
        const Complex z(-5.0 + 10.0 * i / 9.0, -1.0 + 2.0 * jj / 9.0);
        const Complex g = pw_g_ab(a_pw, b_pw, z - lam);
        if (std::abs(g) < 1e-3 * (a_pw + b_pw)) continue;  // near a kernel zero
        ComplexSolution uz(h, z, kopt.solver);
        const Complex jval = oversampling_kernel_from(h, taper, uz, ulam, kopt);
        const Complex ratio = (jval / kdiag) / g;
        if (std::abs(ratio.imag()) > 1e-6 * std::max(1.0, std::abs(ratio.real())))
          throw Error(Errc::NonConstantRatio, "calibration ratio is not real");
        const double r = ratio.real();
        if (used == 0) {
          mn = mx = r;
        } else {
          mn = std::min(mn, r);
          mx = std::max(mx, r);
        }
        sum += r;
        ++used;
      }
    }
  }
  if (used < 10) throw Error(Errc::NonConstantRatio, "too few usable calibration points");
  res.factor = sum / used;
  res.variation = mx - mn;
  res.points_used = used;
  if (res.variation > ratio_tol * std::abs(res.factor))
    throw Error(Errc::NonConstantRatio,
                "calibration ratio varies across the grid beyond tolerance");
  return res;
}

}  // namespace dbs
