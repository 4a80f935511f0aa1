#pragma once

#include "dbs/common.hpp"
#include "dbs/hamiltonian.hpp"
#include "dbs/solver.hpp"

namespace dbs {

// Taper weight for the oversampling kernel: 1 on [0, a], falling linearly to
// 0 at c, 0 on (c, b].  Requires 0 < a < c <= b.
struct Taper {
  double a = 0, c = 0;
};

struct KernelOptions {
  double tol_coincide = 1e-6;  // |z - conj(w)| at or below this: direct form
  double tol_quad = 1e-10;
  bool allow_closed = true;    // use closed forms for a single constant segment
  bool cross_check = false;    // evaluate both forms and compare (throws
                               // CoincidenceInstability on disagreement)
  double cross_check_tol = 1e-6;
  SolverOptions solver;
};

// Reproducing kernel of the chamber at l:
//   K_l(z, w) = integral_0^l u(z)^T H u(conj w) dx
//             = jpair(u(z, l), u(conj w, l)) / (z - conj w)   for z != conj w.
// The quotient form is used away from coincidence, the direct integral at or
// near it.  Note the quotient loses relative accuracy like tol_ode/|z-conj w|
// as the separation shrinks toward tol_coincide.
Complex reproducing_kernel(const Hamiltonian& h, double l, Complex z, Complex w,
                           const KernelOptions& opt = {});

// Oversampling kernel for the taper weight:
//   J(z, w) = integral_0^b u(z)^T H u(conj w) * omega dx
//           = [ integral_a^c jpair(u(z, x), u(conj w, x)) dx ] / ((z - conj w)(c - a))
// with omega the taper.  Same branch policy as the reproducing kernel.
Complex oversampling_kernel(const Hamiltonian& h, const Taper& taper, Complex z, Complex w,
                            const KernelOptions& opt = {});

// Generic-path variants reusing prebuilt fundamental solutions; w is the
// real sample point lambda (so conj(w) = w).  These always integrate (no
// closed-form dispatch) and are the workhorses of batch reconstruction.
Complex reproducing_kernel_from(const Hamiltonian& h, double l, const ComplexSolution& uz,
                                const RealSolution& ulam, const KernelOptions& opt = {});
Complex oversampling_kernel_from(const Hamiltonian& h, const Taper& taper,
                                 const ComplexSolution& uz, const RealSolution& ulam,
                                 const KernelOptions& opt = {});

// Flat-model comparison kernels (entire functions of t = z - conj w):
//   pw_g(a, t)      = sinc(a t)                      (cardinal-series kernel)
//   pw_g_ab(a,b,t)  = (a+b) sinc(t (a+b)/2) sinc(t (b-a)/2)
// pw_g_ab(1, 2, pi) = -4/pi^2, and pw_g_ab -> a + b as t -> 0.
Complex csinc(Complex x);
Complex pw_g(double a, Complex t);
Complex pw_g_ab(double a, double b, Complex t);

// Measures the constant relating the system oversampling expansion on the
// doubled interval [0, 2 b_pw] (constant weight g0 = 0) to the flat-model
// kernel pw_g_ab: ratios (J / k_diag) / pw_g_ab over a z-grid and the sample
// points lambda_j = j pi / b_pw.  Throws NonConstantRatio if the ratio
// varies beyond ratio_tol relatively; returns the mean (the normalization
// constant, 1 / (2 b_pw)).
struct CalibrationResult {
  double factor = 0;
  double variation = 0;  // max - min across accepted ratio samples
  int points_used = 0;
  double a = 0, b = 0;
};
CalibrationResult calibrate_pw_normalization(double a_pw, double b_pw,
                                             double ratio_tol = 1e-6);

}  // namespace dbs
