#pragma once

#include <optional>
#include <vector>

#include "dbs/common.hpp"
#include "dbs/exec.hpp"
#include "dbs/hamiltonian.hpp"
#include "dbs/solver.hpp"

namespace dbs {

// One point of a self-adjoint-extension spectrum: index n, eigenvalue
// lambda_n (the solution of theta(lambda, b) = gamma + n pi), and the
// squared norm k_diag = ||u(lambda_n, .)||^2 of the eigenfunction, which is
// also the diagonal kernel value at lambda_n.
struct Eigenvalue {
  long long n = 0;
  double lambda = 0;
  double k_diag = 0;
};

struct SpectrumOptions {
  SolverOptions solver;
  double tol_quad = 1e-10;
  Exec exec = Exec::Serial;
  bool with_k_diag = true;
};

// Exceptional boundary angle (direction of the terminal singular interval
// plus pi/2, mod pi), if H ends in a singular interval.  That extension's
// top eigenvalue escapes to infinity; eigenvalue enumeration refuses it.
std::optional<double> detect_exceptional(const Hamiltonian& h);

// Eigenvalues lambda_n for n in [n_min, n_max] of the extension with
// boundary angle gamma in [0, pi).  Diagonal weights take the exact
// constant-segment phase maps; general symmetric weights are enumerated by
// phase continuation of the computed solution.  Throws
// ExceptionalExtension near the exceptional angle and MonotonicityFailure
// if the phase fails to bracket a target.
std::vector<Eigenvalue> eigenvalues(const Hamiltonian& h, double gamma, long long n_min,
                                    long long n_max, const SpectrumOptions& opt = {});

// Least-squares check of the counting asymptotics lambda_n ~ (pi/type) n.
struct CountingFit {
  double slope = 0;          // fitted d lambda / d n
  double intercept = 0;
  double slope_model = 0;    // pi / exponential type
  double slope_rel_dev = 0;  // |slope - model| / model
  double max_abs_residual = 0;
};
CountingFit counting_check(const std::vector<Eigenvalue>& table, double exponential_type);

}  // namespace dbs
