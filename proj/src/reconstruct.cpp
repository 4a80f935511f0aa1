#include "dbs/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace dbs {

std::vector<Complex> GridSpec::points() const {
  if (n_re < 1 || n_im < 1) throw Error(Errc::ConfigError, "grid needs at least one point");
  std::vector<Complex> zs;
  zs.reserve(static_cast<std::size_t>(n_re) * n_im);
  for (int i = 0; i < n_re; ++i) {
    const double re = (n_re == 1) ? re_lo : re_lo + (re_hi - re_lo) * i / (n_re - 1);
    for (int j = 0; j < n_im; ++j) {
      const double im = (n_im == 1) ? im_lo : im_lo + (im_hi - im_lo) * j / (n_im - 1);
      zs.emplace_back(re, im);
    }
  }
  return zs;
}

SampleSet make_samples(const Hamiltonian& h, const std::vector<Eigenvalue>& spectrum,
                       const SampleSource& src, double support_bound, Exec exec,
                       const KernelOptions& kopt) {
  if (!(src.l > 0)) throw Error(Errc::EmptyDomain, "sample source requires l > 0");
  if (src.l > support_bound + 1e-12 * std::max(1.0, support_bound))
    throw Error(Errc::SupportViolation,
                "sampled function lives outside the reconstruction support bound");

  SampleSet out;
  out.points = spectrum;
  out.values.resize(spectrum.size());

  if (const auto* c = (h.segments.size() == 1)
                          ? std::get_if<ConstantDiagonal>(&h.segments.front().data)
                          : nullptr;
      c && kopt.allow_closed) {
    parallel_for(spectrum.size(), exec, [&](std::size_t i) {
      out.values[i] = reproducing_kernel(h, src.l, spectrum[i].lambda, src.w0, kopt);
    });
    return out;
  }

  // Generic path: K_l(lambda_n, w0) = conj(K_l(w0, lambda_n)), sharing one
  // complex solution at w0 across all n.
  ComplexSolution uw0(h, src.w0, kopt.solver);
  parallel_for(spectrum.size(), exec, [&](std::size_t i) {
    RealSolution ulam(h, spectrum[i].lambda, kopt.solver);
    out.values[i] = std::conj(reproducing_kernel_from(h, src.l, uw0, ulam, kopt));
  });
  return out;
}

std::vector<Complex> reference_on_grid(const Hamiltonian& h, const SampleSource& src,
                                       const GridSpec& grid, Exec exec,
                                       const KernelOptions& kopt) {
  const std::vector<Complex> zs = grid.points();
  std::vector<Complex> out(zs.size());
  parallel_for(zs.size(), exec, [&](std::size_t i) {
    out[i] = reproducing_kernel(h, src.l, zs[i], src.w0, kopt);
  });
  return out;
}

CoefficientKernel::CoefficientKernel(const Hamiltonian& h, const SampleSet& samples,
                                     ReconMode mode, std::optional<Taper> taper,
                                     KernelOptions kopt, Exec exec)
    : h_(h), samples_(samples), mode_(mode), taper_(std::move(taper)), kopt_(kopt) {
  if (mode_ == ReconMode::Oversampling && !taper_)
    throw Error(Errc::ConfigError, "oversampled reconstruction requires a taper");
  for (std::size_t i = 1; i < samples_.points.size(); ++i)
    if (samples_.points[i].n <= samples_.points[i - 1].n)
      throw Error(Errc::ConfigError, "sample set must be sorted by index n");

  if (h_.segments.size() == 1) {
    if (const auto* c = std::get_if<ConstantDiagonal>(&h_.segments.front().data);
        c && kopt_.allow_closed) {
      closed_ = true;
      g0_ = c->g0;
      return;
    }
  }
  basis_.resize(samples_.points.size());
  parallel_for(samples_.points.size(), exec, [&](std::size_t i) {
    basis_[i] = std::make_shared<RealSolution>(h_, samples_.points[i].lambda, kopt_.solver);
  });
}

std::vector<Complex> CoefficientKernel::row(Complex z) const {
  std::vector<Complex> out(samples_.points.size());
  if (closed_) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double lam = samples_.points[i].lambda;
      if (mode_ == ReconMode::Sampling)
        out[i] = reproducing_kernel(h_, h_.b(), z, lam, kopt_);
      else
        out[i] = oversampling_kernel(h_, *taper_, z, lam, kopt_);
    }
    return out;
  }
  ComplexSolution uz(h_, z, kopt_.solver);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mode_ == ReconMode::Sampling)
      out[i] = reproducing_kernel_from(h_, h_.b(), uz, *basis_[i], kopt_);
    else
      out[i] = oversampling_kernel_from(h_, *taper_, uz, *basis_[i], kopt_);
  }
  return out;
}

std::vector<Complex> reconstruct_on_grid(const Hamiltonian& h, const SampleSet& samples,
                                         const GridSpec& grid, const ReconOptions& opt) {
  if (samples.points.size() != samples.values.size())
    throw Error(Errc::ConfigError, "sample set points/values length mismatch");
  CoefficientKernel kernel(h, samples, opt.mode, opt.taper, opt.kernel, opt.exec);
  const std::vector<Complex> zs = grid.points();
  std::vector<Complex> out(zs.size());
  parallel_for(zs.size(), opt.exec, [&](std::size_t i) {
    const std::vector<Complex> kr = kernel.row(zs[i]);
    std::vector<Complex> terms(kr.size());
    for (std::size_t n = 0; n < kr.size(); ++n)
      terms[n] = samples.values[n] * kr[n] / samples.points[n].k_diag;
    out[i] = pairwise_sum(terms);
  });
  return out;
}

double bound_constant(const Hamiltonian& h, const SampleSet& samples, const GridSpec& grid,
                      const ReconOptions& opt) {
  CoefficientKernel kernel(h, samples, opt.mode, opt.taper, opt.kernel, opt.exec);
  const std::vector<Complex> zs = grid.points();
  std::vector<double> sums(zs.size());
  parallel_for(zs.size(), opt.exec, [&](std::size_t i) {
    const std::vector<Complex> kr = kernel.row(zs[i]);
    std::vector<double> terms(kr.size());
    for (std::size_t n = 0; n < kr.size(); ++n)
      terms[n] = std::abs(kr[n]) / std::sqrt(samples.points[n].k_diag);
    sums[i] = pairwise_sum(terms);
  });
  double mx = 0;
  for (double s : sums) mx = std::max(mx, s);
  return mx;
}

SampleSet truncate_samples(const SampleSet& s, long long N) {
  SampleSet out;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    if (std::llabs(s.points[i].n) <= N) {
      out.points.push_back(s.points[i]);
      out.values.push_back(s.values[i]);
    }
  }
  return out;
}

SampleSet perturb(const SampleSet& in, const NoiseSpec& noise,
                  const std::vector<Complex>* direction_coeffs) {
  if (!(noise.p > 2))
    throw Error(Errc::UnsupportedP,
                "perturbation ball exponent must satisfy p > 2 (p = inf allowed)");
  if (!(noise.eps >= 0)) throw Error(Errc::ConfigError, "noise radius must be >= 0");
  const std::size_t m = in.points.size();
  SampleSet out = in;
  if (noise.eps == 0 || m == 0) return out;

  const bool pinf = std::isinf(noise.p);
  std::vector<Complex> e(m);

  if (noise.mode == NoiseMode::Random) {
    std::mt19937_64 rng(noise.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double mag = unit(rng);
      const double phase = 2 * M_PI * unit(rng);
      e[i] = mag * Complex(std::cos(phase), std::sin(phase));
    }
    double denom = 0;
    if (pinf) {
      for (const auto& v : e) denom = std::max(denom, std::abs(v));
    } else {
      for (const auto& v : e) denom += std::pow(std::abs(v), noise.p);
      denom = std::pow(denom, 1.0 / noise.p);
    }
    if (denom == 0) return out;
    for (auto& v : e) v *= noise.eps / denom;
  } else {
    if (!direction_coeffs || direction_coeffs->size() != m)
      throw Error(Errc::ConfigError,
                  "adversarial perturbation requires a coefficient row of matching length");
    // Hoelder-sharp alignment: with q the dual exponent, e_n proportional to
    // conj(c_n) |c_n|^{q-2}, scaled onto the eps sphere of l_p.
    const auto& c = *direction_coeffs;
    if (pinf) {
      for (std::size_t i = 0; i < m; ++i) {
        const double a = std::abs(c[i]);
        e[i] = (a > 0) ? noise.eps * std::conj(c[i]) / a : Complex(noise.eps, 0);
      }
    } else {
      const double q = noise.p / (noise.p - 1.0);
      double norm_q = 0;
      for (std::size_t i = 0; i < m; ++i) norm_q += std::pow(std::abs(c[i]), q);
      norm_q = std::pow(norm_q, 1.0 / q);
      if (norm_q == 0) return out;
      for (std::size_t i = 0; i < m; ++i) {
        const double a = std::abs(c[i]);
        e[i] = (a > 0) ? noise.eps * std::conj(c[i]) * std::pow(a, q - 2.0) /
                             std::pow(norm_q, q - 1.0)
                       : Complex(0, 0);
      }
    }
  }

  for (std::size_t i = 0; i < m; ++i)
    out.values[i] += e[i] * std::sqrt(in.points[i].k_diag);
  return out;
}

TailDiagnostic tail_diagnostic(const CoefficientKernel& kernel, Complex z, double q) {
  const SampleSet& s = kernel.samples();
  const std::vector<Complex> kr = kernel.row(z);

  TailDiagnostic d;
  std::vector<std::pair<double, double>> pts;  // (|lambda|, term)
  std::vector<double> terms(kr.size());
  for (std::size_t i = 0; i < kr.size(); ++i)
    terms[i] = std::pow(std::abs(kr[i]) / std::sqrt(s.points[i].k_diag), q);
  d.total = pairwise_sum(terms);
  for (std::size_t i = 0; i < kr.size(); ++i) {
    const double a = std::abs(s.points[i].lambda);
    if (a > 1e-12) pts.emplace_back(a, terms[i]);
  }
  std::sort(pts.begin(), pts.end());
  for (const auto& [a, t] : pts) {
    d.abscissa.push_back(a);
    d.terms.push_back(t);
  }
  if (pts.size() < 8) return d;

  // Octave-envelope fit over the top four octaves: the terms oscillate
  // through zero, so fit the per-octave maxima instead of raw values.
  const double amax = pts.back().first;
  const double amid = std::max(pts.front().first, amax / 16.0);
  std::vector<double> bx, by;
  double lo = amid;
  while (lo < amax) {
    const double hi = 2 * lo;
    double best = 0, where = 0;
    for (const auto& [a, t] : pts)
      if (a >= lo && a < hi && t > best) {
        best = t;
        where = a;
      }
    if (best > 1e-300) {
      bx.push_back(std::log(where));
      by.push_back(std::log(best));
    }
    lo = hi;
  }
  if (bx.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(bx.size());
    for (std::size_t i = 0; i < bx.size(); ++i) {
      sx += bx[i];
      sy += by[i];
      sxx += bx[i] * bx[i];
      sxy += bx[i] * by[i];
    }
    d.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return d;
}

double sup_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) throw Error(Errc::ConfigError, "grid size mismatch");
  double mx = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mx = std::max(mx, std::abs(a[i] - b[i]));
  return mx;
}

}  // namespace dbs
