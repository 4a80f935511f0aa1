#pragma once

#include <vector>

#include "dbs/common.hpp"

namespace dbs {

// Special function for the H = diag(1, x) subsystem: wi is the solution of
// w'' = -x w with wi(0) = 0, wi'(0) = 1.  The fundamental solution of the
// canonical system is then u1(z, x) = wi'(z^{2/3} x) and u2(z, x) =
// z^{1/3} wi(z^{2/3} x), both entire in z (only even/odd powers survive).

enum class WiBranch { Series, Asymptotic };

struct WiValue {
  double wi = 0;
  double wi_prime = 0;
  WiBranch branch = WiBranch::Series;
};

// Branch switch location; the two branches overlap accurately on roughly
// [wi_switch() - 1, wi_switch() + 1].
double wi_switch();

// Evaluate wi and wi' at x.  Series branch for x <= wi_switch() (all real x
// below the switch, including negative); asymptotic branch above.  On first
// use the branches are compared across the overlap window and BranchMismatch
// is thrown if they disagree beyond 1e-8.
WiValue wi_eval(double x);

// Maximum across the overlap window of the relative branch disagreement
// (diagnostic; also what the first-use check gates on).
double wi_branch_agreement();

// w_beta(x) = wi'(x) - beta sqrt(x) wi(x) for x >= 0; its zeros encode the
// boundary condition of the self-adjoint extensions.
double w_beta(double beta, double x);

// Leading amplitude of the oscillatory asymptotics,
// c0 = 2 sqrt(pi) / (3^{2/3} Gamma(2/3)).
double airy_c0();

// Gamma function for positive arguments (Lanczos); used for airy_c0 and
// exposed for tests.
double gamma_positive(double x);

struct ZeroTable {
  std::vector<double> zeros;      // ascending
  std::vector<double> guesses;    // closed-form model guesses
  std::vector<double> residuals;  // |f(zero)| after refinement
};

// First n positive zeros of wi (n >= 1, zeros indexed 1..n in the model
// y_n ~ ((3/2) pi (n - 1/12))^{2/3}).  Throws EnumerationGap if the computed
// sequence is inconsistent with unit-pi phase spacing.
ZeroTable wi_zeros(int n);

// First n positive zeros of w_beta, indexed 0..n-1 in the model
// zeta_n ~ (n + 5/12) pi - arctan(beta), x = (3 zeta / 2)^{2/3}.  The lowest
// zeros are located by scanning (the model degrades for small n / large
// beta); the rest by Newton from the model guess.
ZeroTable w_beta_zeros(double beta, int n);

// Eigenvalues of the diag(1, x) system on [0, b] for the extension angle
// gamma in [0, pi), indices n_min..n_max, via the zero tables:
//   gamma = 0:        lambda_n = (y_n / b)^{3/2} (lambda_0 = 0, symmetric)
//   gamma in (0, pi): beta = cot(gamma)/sqrt(b); positive eigenvalues from
//                     w_beta zeros, negative from w_{-beta} zeros.
// k_diag holds the squared norms from the closed-form expression.
struct AiryEigenvalue {
  long long n = 0;
  double lambda = 0;
  double k_diag = 0;
};
std::vector<AiryEigenvalue> airy_spectrum(double b, double gamma, long long n_min,
                                          long long n_max);

// Closed-form squared norm of u(lambda, .) on [0, b]:
// (|lambda|^{-2/3}/3) (2 s^2 wi(s)^2 + 2 s wi'(s)^2 + wi(s) wi'(s)) with
// s = |lambda|^{2/3} b; equals b at lambda = 0.
double airy_norm_squared(double lambda, double b);

// Fundamental solution of the diag(1, x) system.  The real overload routes
// through the wi branches (valid for all real lambda); the complex overload
// uses the entire double series in z^2 x^3 and throws BranchMismatch outside
// its accuracy region (|z^2 x^3| large with nonreal z).
Vec2 airy_solution(double lambda, double x);
Vec2c airy_solution(Complex z, double x);

}  // namespace dbs
