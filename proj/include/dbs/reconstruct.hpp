#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "dbs/common.hpp"
#include "dbs/exec.hpp"
#include "dbs/kernels.hpp"
#include "dbs/spectrum.hpp"

namespace dbs {

// Evaluation grid in the complex plane; points() enumerates re-major
// (outer loop over the real axis, inner over the imaginary axis).
struct GridSpec {
  double re_lo = -5, re_hi = 5;
  int n_re = 51;
  double im_lo = -1, im_hi = 1;
  int n_im = 11;
  std::vector<Complex> points() const;
};

// Sample source: the kernel section F = K_l(., w0), an element of the
// chamber at l with a known closed evaluation everywhere.
struct SampleSource {
  Complex w0{0, 0};
  double l = 0;
};

struct SampleSet {
  std::vector<Eigenvalue> points;  // sample abscissae with diagonal norms
  std::vector<Complex> values;     // F(lambda_n)
};

enum class ReconMode { Sampling, Oversampling };

struct ReconOptions {
  ReconMode mode = ReconMode::Sampling;
  std::optional<Taper> taper;  // required for Oversampling
  KernelOptions kernel;
  Exec exec = Exec::Serial;
};

// F(lambda_n) for each spectrum point.  support_bound is the bound the
// sampled function must live under (taper.a for oversampled reconstruction,
// b for critical sampling); src.l beyond it throws SupportViolation.
SampleSet make_samples(const Hamiltonian& h, const std::vector<Eigenvalue>& spectrum,
                       const SampleSource& src, double support_bound,
                       Exec exec = Exec::Serial, const KernelOptions& kopt = {});

// Reference values F(z) over the grid.
std::vector<Complex> reference_on_grid(const Hamiltonian& h, const SampleSource& src,
                                       const GridSpec& grid, Exec exec = Exec::Serial,
                                       const KernelOptions& kopt = {});

// Interpolation-type reconstruction from samples:
//   Sampling:      sum_n F_n K_b(z, lambda_n) / k_diag_n
//   Oversampling:  sum_n F_n J(z, lambda_n) / k_diag_n
// Terms are evaluated in ascending-n order and pairwise-summed, so results
// are byte-identical between serial and parallel execution.
std::vector<Complex> reconstruct_on_grid(const Hamiltonian& h, const SampleSet& samples,
                                         const GridSpec& grid, const ReconOptions& opt);

// Stability bound constant max_z sum_n |Kernel(z, lambda_n)| / sqrt(k_diag_n);
// perturbations within the weighted l_inf ball of radius eps move the
// reconstruction by at most eps times this number anywhere on the grid.
double bound_constant(const Hamiltonian& h, const SampleSet& samples, const GridSpec& grid,
                      const ReconOptions& opt);

// Keep only samples with |n| <= N.
SampleSet truncate_samples(const SampleSet& s, long long N);

enum class NoiseMode { Random, Adversarial };

struct NoiseSpec {
  NoiseMode mode = NoiseMode::Random;
  double p = std::numeric_limits<double>::infinity();  // weighted l_p exponent, p > 2
  double eps = 0;
  unsigned long long seed = 1;
};

// Adds a perturbation of weighted l_p norm exactly eps to the sample values
// (weights 1/sqrt(k_diag_n), i.e. the normalized errors lie on the eps
// sphere).  Random mode draws magnitudes and phases from mt19937_64(seed) in
// ascending-n order and projects; Adversarial mode aligns Hoelder-sharply
// against the supplied coefficient row (kernel values at the attack point
// divided by k_diag).  Throws UnsupportedP for p <= 2.
SampleSet perturb(const SampleSet& in, const NoiseSpec& noise,
                  const std::vector<Complex>* direction_coeffs = nullptr);

// Kernel row evaluation shared by reconstruction, bounds, diagnostics and
// adversarial directions: values Kernel(z, lambda_n) for all samples.
class CoefficientKernel {
 public:
  CoefficientKernel(const Hamiltonian& h, const SampleSet& samples, ReconMode mode,
                    std::optional<Taper> taper, KernelOptions kopt, Exec exec = Exec::Serial);
  std::vector<Complex> row(Complex z) const;  // ascending-n kernel values
  const SampleSet& samples() const { return samples_; }

 private:
  const Hamiltonian h_;
  SampleSet samples_;
  ReconMode mode_;
  std::optional<Taper> taper_;
  KernelOptions kopt_;
  bool closed_ = false;
  double g0_ = 0;
  std::vector<std::shared_ptr<RealSolution>> basis_;  // generic path only
};

// Tail behavior of the normalized kernel row at z: terms
// (|Kernel(z, lambda_n)| / sqrt(k_diag_n))^q against |lambda_n|.  The decay
// exponent is a log-log least-squares fit of the octave-envelope over the
// upper half of the abscissa range.
struct TailDiagnostic {
  double total = 0;
  double exponent = 0;
  std::vector<double> abscissa;  // |lambda_n|, ascending
  std::vector<double> terms;
};
TailDiagnostic tail_diagnostic(const CoefficientKernel& kernel, Complex z, double q);

double sup_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b);

}  // namespace dbs
