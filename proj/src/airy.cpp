#include "dbs/airy.hpp"

#include <cmath>
#include <mutex>

namespace dbs {

namespace {

constexpr double kSwitch = 8.5;
constexpr int kAsymTerms = 12;

// Series branch: wi(x) = sum_k (-1)^k c_k x^{3k+1}/(3k+1)! with c_0 = 1 and
// c_k / c_{k-1} = 3k - 1.  Folding the factorials into the term recurrence:
//   T_k / T_{k-1} = -x^3 / (3k (3k+1))        for wi
//   S_k / S_{k-1} = -x^3 / (3k (3k-2))        for wi'
// Long-double accumulation keeps the alternating cancellation harmless over
// the series branch range.
WiValue wi_series(double x) {
  const long double x3 = static_cast<long double>(x) * x * x;
  long double tw = x;  // k = 0 term of wi: x
  long double wv = tw;
  long double tp = 1;  // k = 0 term of wi': 1
  long double pv = tp;
  for (int k = 1; k <= 400; ++k) {
    tw *= -x3 / (3.0L * k * (3 * k + 1));
    tp *= -x3 / (3.0L * k * (3 * k - 2));
    wv += tw;
    pv += tp;
    if (std::abs(static_cast<double>(tw)) < 1e-19L * (std::abs(static_cast<double>(wv)) + 1e-30) &&
        std::abs(static_cast<double>(tp)) < 1e-19L * (std::abs(static_cast<double>(pv)) + 1e-30))
      break;
  }
  return {static_cast<double>(wv), static_cast<double>(pv), WiBranch::Series};
}

// Asymptotic branch for large positive x, with zeta = (2/3) x^{3/2}:
//   wi(x)  =  c0 x^{-1/4} [ sin(psi) Ue(zeta) - cos(psi) Uo(zeta) ]
//   wi'(x) =  c0 x^{+1/4} [ cos(psi) Ve(zeta) + sin(psi) Vo(zeta) ]
// psi = zeta + pi/12, Ue/Uo (Ve/Vo) the even/odd alternating tails built
// from the classical u_k (v_k) coefficients.
WiValue wi_asymptotic(double x) {
  const long double zeta = (2.0L / 3.0L) * std::pow(static_cast<long double>(x), 1.5L);
  long double uk = 1, ue = 1, uo = 0, ve = 1, vo = 0;
  long double zpow = 1;  // zeta^{-k}
  for (int k = 1; k <= kAsymTerms; ++k) {
    uk *= (6.0L * k - 5) * (6.0L * k - 3) * (6.0L * k - 1) / ((2.0L * k - 1) * 216.0L * k);
    const long double vk = -uk * (6.0L * k + 1) / (6.0L * k - 1);
    zpow /= zeta;
    // (-1)^j with j = k/2 for even k (term index 2j), j = (k-1)/2 for odd.
    const long double sign = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
    if (k % 2 == 0) {
      ue += sign * uk * zpow;
      ve += sign * vk * zpow;
    } else {
      uo += sign * uk * zpow;
      vo += sign * vk * zpow;
    }
  }
  constexpr long double kPiL = 3.141592653589793238462643383279502884L;
  const long double psi = zeta + kPiL / 12.0L;
  const long double s = std::sin(psi), c = std::cos(psi);
  const long double amp = static_cast<long double>(airy_c0());
  const long double xq = std::pow(static_cast<long double>(x), 0.25L);
  return {static_cast<double>(amp / xq * (s * ue - c * uo)),
          static_cast<double>(amp * xq * (c * ve + s * vo)), WiBranch::Asymptotic};
}

double branch_agreement_unchecked() {
  double worst = 0;
  for (double x : {kSwitch - 1.0, kSwitch - 0.5, kSwitch, kSwitch + 0.5, kSwitch + 1.0}) {
    const WiValue a = wi_series(x);
    const WiValue b = wi_asymptotic(x);
    const double scale = std::max({std::abs(a.wi), std::abs(a.wi_prime), 1.0});
    worst = std::max(worst, std::abs(a.wi - b.wi) / scale);
    worst = std::max(worst, std::abs(a.wi_prime - b.wi_prime) / scale);
  }
  return worst;
}

void check_branches_once() {
  static std::once_flag flag;
  static bool ok = false;
  static double measured = 0;
  std::call_once(flag, [] {
    measured = branch_agreement_unchecked();
    ok = measured <= 1e-8;
  });
  if (!ok)
    throw Error(Errc::BranchMismatch,
                "series and asymptotic branches disagree across the overlap window");
}

}  // namespace

double wi_switch() { return kSwitch; }

double wi_branch_agreement() { return branch_agreement_unchecked(); }

WiValue wi_eval(double x) {
  check_branches_once();
  if (x <= kSwitch) return wi_series(x);
  return wi_asymptotic(x);
}

double w_beta(double beta, double x) {
  if (x < 0) throw Error(Errc::ConfigError, "w_beta requires x >= 0");
  const WiValue w = wi_eval(x);
  return w.wi_prime - beta * std::sqrt(x) * w.wi;
}

double gamma_positive(double x) {
  if (!(x > 0)) throw Error(Errc::ConfigError, "gamma_positive requires x > 0");
  // Lanczos approximation, g = 7, 9 coefficients.
  static const double g = 7;
  static const double coef[9] = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // reflection (not needed for c0 but keeps the function total on (0, inf))
    return M_PI / (std::sin(M_PI * x) * gamma_positive(1 - x));
  }
  x -= 1;
  double a = coef[0];
  const double t = x + g + 0.5;
  for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
  return std::sqrt(2 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double airy_c0() {
  static const double c0 = 2.0 * std::sqrt(M_PI) / (std::pow(3.0, 2.0 / 3.0) * gamma_positive(2.0 / 3.0));
  return c0;
}

namespace {

// Safeguarded Newton refinement of a zero of f inside [lo, hi] (f must have
// opposite signs at the ends).  Returns the refined zero.
template <class F, class DF>
double refine_zero(F f, DF df, double lo, double hi, double x0) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw Error(Errc::EnumerationGap, "zero bracket does not change sign");
  double x = std::clamp(x0, lo, hi);
  for (int it = 0; it < 100; ++it) {
    const double fx = f(x);
    if ((fx > 0) == (flo > 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double d = df(x);
    double xn = (d != 0) ? x - fx / d : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) < 1e-15 * std::max(1.0, std::abs(x))) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

double zeta_of_x(double x) { return (2.0 / 3.0) * std::pow(x, 1.5); }
double x_of_zeta(double z) { return std::pow(1.5 * z, 2.0 / 3.0); }

}  // namespace

ZeroTable wi_zeros(int n) {
  if (n < 1) throw Error(Errc::ConfigError, "wi_zeros requires n >= 1");
  ZeroTable t;
  auto f = [](double x) { return wi_eval(x).wi; };
  auto df = [](double x) { return wi_eval(x).wi_prime; };
  for (int k = 1; k <= n; ++k) {
    const double guess = x_of_zeta(M_PI * (k - 1.0 / 12.0));
    const double lo = x_of_zeta(M_PI * std::max(k - 1.0 / 12.0 - 0.45, 0.05));
    const double hi = x_of_zeta(M_PI * (k - 1.0 / 12.0 + 0.45));
    const double z = refine_zero(f, df, lo, hi, guess);
    t.zeros.push_back(z);
    t.guesses.push_back(guess);
    t.residuals.push_back(std::abs(f(z)));
  }
  // Unit-pi phase spacing consistency: a missed or doubled zero shows up as
  // a spacing far from pi.
  for (std::size_t i = 1; i < t.zeros.size(); ++i) {
    const double dz = zeta_of_x(t.zeros[i]) - zeta_of_x(t.zeros[i - 1]);
    if (std::abs(dz - M_PI) > 0.5)
      throw Error(Errc::EnumerationGap, "zero sequence spacing inconsistent with the phase model");
  }
  return t;
}

ZeroTable w_beta_zeros(double beta, int n) {
  if (n < 1) throw Error(Errc::ConfigError, "w_beta_zeros requires n >= 1");
  ZeroTable t;
  auto f = [&](double x) { return w_beta(beta, x); };
  // derivative of w_beta: wi'' = -x wi, so
  // d/dx [wi' - beta sqrt(x) wi] = -x wi - beta (wi/(2 sqrt(x)) + sqrt(x) wi')
  auto df = [&](double x) {
    const WiValue w = wi_eval(x);
    const double sx = std::sqrt(x);
    return -x * w.wi - beta * (w.wi / (2 * sx) + sx * w.wi_prime);
  };

  const double shift = std::atan(beta);
  int found = 0;
  // The zeta model is poor for the lowest zeros when |beta| is large, so the
  // first few zeros are located by a sign scan from 0+ and checked against
  // the model afterwards.
  {
    const double scan_hi = x_of_zeta(std::max((3 + 5.0 / 12.0) * M_PI - shift, 2.0)) + 1.0;
    const int steps = 4000;
    double xprev = 1e-9, fprev = f(xprev);
    for (int i = 1; i <= steps && found < std::min(n, 3); ++i) {
      const double x = xprev + (scan_hi - 1e-9) / steps;
      const double fx = f(x);
      if ((fx > 0) != (fprev > 0)) {
        const double z = refine_zero(f, df, xprev, x, 0.5 * (xprev + x));
        t.zeros.push_back(z);
        t.guesses.push_back(z);
        t.residuals.push_back(std::abs(f(z)));
        ++found;
      }
      xprev = x;
      fprev = fx;
    }
  }
  for (int k = found; k < n; ++k) {
    const double zg = (k + 5.0 / 12.0) * M_PI - shift;
    if (zg <= 0.35)
      throw Error(Errc::EnumerationGap, "zero model invalid for the requested index");
    const double guess = x_of_zeta(zg);
    const double lo = x_of_zeta(std::max(zg - 0.45 * M_PI, 0.05));
    const double hi = x_of_zeta(zg + 0.45 * M_PI);
    const double z = refine_zero(f, df, lo, hi, guess);
    t.zeros.push_back(z);
    t.guesses.push_back(guess);
    t.residuals.push_back(std::abs(f(z)));
  }
  // Model guesses for the scanned heads (reported for diagnostics) and the
  // spacing consistency check.
  for (int k = 0; k < std::min(found, n); ++k) {
    const double zg = (k + 5.0 / 12.0) * M_PI - shift;
    t.guesses[k] = zg > 0 ? x_of_zeta(zg) : t.zeros[k];
  }
  for (std::size_t i = 1; i < t.zeros.size(); ++i) {
    if (!(t.zeros[i] > t.zeros[i - 1]))
      throw Error(Errc::EnumerationGap, "zero sequence not strictly increasing");
    const double dz = zeta_of_x(t.zeros[i]) - zeta_of_x(t.zeros[i - 1]);
    if (std::abs(dz - M_PI) > 0.6)
      throw Error(Errc::EnumerationGap, "zero sequence spacing inconsistent with the phase model");
  }
  return t;
}

double airy_norm_squared(double lambda, double b) {
  if (!(b > 0)) throw Error(Errc::EmptyDomain, "norm requires b > 0");
  if (lambda == 0) return b;
  const double al = std::abs(lambda);
  const double s = std::pow(al, 2.0 / 3.0) * b;
  const WiValue w = wi_eval(s);
  return (std::pow(al, -2.0 / 3.0) / 3.0) *
         (2 * s * s * w.wi * w.wi + 2 * s * w.wi_prime * w.wi_prime + w.wi * w.wi_prime);
}

std::vector<AiryEigenvalue> airy_spectrum(double b, double gamma, long long n_min,
                                          long long n_max) {
  if (!(b > 0)) throw Error(Errc::EmptyDomain, "spectrum requires b > 0");
  if (!(gamma >= 0 && gamma < M_PI))
    throw Error(Errc::ConfigError, "extension angle must lie in [0, pi)");
  if (n_min > n_max) throw Error(Errc::ConfigError, "empty index range");

  std::vector<AiryEigenvalue> out;
  auto lam_of_zero = [&](double x0) { return std::pow(x0 / b, 1.5); };

  if (gamma == 0) {
    const int kmax = static_cast<int>(std::max(n_max, -n_min));
    ZeroTable zt;
    if (kmax >= 1) zt = wi_zeros(kmax);
    for (long long nn = n_min; nn <= n_max; ++nn) {
      double lam = 0;
      if (nn > 0) lam = lam_of_zero(zt.zeros[static_cast<std::size_t>(nn - 1)]);
      if (nn < 0) lam = -lam_of_zero(zt.zeros[static_cast<std::size_t>(-nn - 1)]);
      out.push_back({nn, lam, airy_norm_squared(lam, b)});
    }
    return out;
  }

  const double beta = std::cos(gamma) / std::sin(gamma) / std::sqrt(b);
  ZeroTable pos, neg;
  if (n_max >= 0) pos = w_beta_zeros(beta, static_cast<int>(n_max) + 1);
  if (n_min <= -1) neg = w_beta_zeros(-beta, static_cast<int>(-n_min));
  for (long long nn = n_min; nn <= n_max; ++nn) {
    double lam;
    if (nn >= 0)
      lam = lam_of_zero(pos.zeros[static_cast<std::size_t>(nn)]);
    else
      lam = -lam_of_zero(neg.zeros[static_cast<std::size_t>(-nn - 1)]);
    out.push_back({nn, lam, airy_norm_squared(lam, b)});
  }
  return out;
}

Vec2 airy_solution(double lambda, double x) {
  if (x < 0) throw Error(Errc::ConfigError, "domain coordinate must be >= 0");
  if (lambda == 0) return {1.0, 0.0};
  const double al = std::abs(lambda);
  const double p = std::pow(al, 1.0 / 3.0);
  const double s = p * p * x;
  const WiValue w = wi_eval(s);
  return {w.wi_prime, (lambda > 0 ? p : -p) * w.wi};
}

Vec2c airy_solution(Complex z, double x) {
  if (x < 0) throw Error(Errc::ConfigError, "domain coordinate must be >= 0");
  if (std::abs(z.imag()) < 1e-14) {
    const Vec2 u = airy_solution(z.real(), x);
    return {Complex(u.x, 0), Complex(u.y, 0)};
  }
  const Complex w = z * z * x * x * x;
  if (std::abs(w) > 600.0)
    throw Error(Errc::BranchMismatch,
                "entire-series evaluation not accurate for this argument magnitude");
  // u1 = sum (-1)^k c_k w^k/(3k)!, u2 = z x sum (-1)^k c_k w^k/(3k+1)!
  std::complex<long double> wl(w.real(), w.imag());
  std::complex<long double> t1(1, 0), s1 = t1;
  std::complex<long double> t2(1, 0), s2 = t2;
  for (int k = 1; k <= 200; ++k) {
    t1 *= -wl / (3.0L * k * (3 * k - 2));
    t2 *= -wl / (3.0L * k * (3 * k + 1));
    s1 += t1;
    s2 += t2;
    if (std::abs(t1) < 1e-20L * (std::abs(s1) + 1e-30L) &&
        std::abs(t2) < 1e-20L * (std::abs(s2) + 1e-30L))
      break;
  }
  const Complex u1(static_cast<double>(s1.real()), static_cast<double>(s1.imag()));
  const Complex u2s(static_cast<double>(s2.real()), static_cast<double>(s2.imag()));
  return {u1, z * x * u2s};
}

}  // namespace dbs
