#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dbs/common.hpp"

namespace dbs {

// Segment kinds for the piecewise weight matrix H(x) on [0, b].
//
// ConstantDiagonal:  H = diag(1/2 + g0, 1/2 - g0), |g0| <= 1/2.
// DiagonalPoly:      H = diag(1/2 + g(x), 1/2 - g(x)), g a polynomial in the
//                    global coordinate x (coefficients low-to-high degree).
// LinearEntry:       H = diag(p1(x), p2(x)) with nonnegative polynomials,
//                    e.g. p1 = {1}, p2 = {0, 1} gives diag(1, x).
// GridSegment:       entries piecewise linear between strictly increasing
//                    nodes x (x.front() == from, x.back() == to).
// SingularSegment:   H = xi xi^T for the fixed unit direction
//                    xi = (cos phi, sin phi); rank one, trace one.
struct ConstantDiagonal {
  double g0 = 0;
};
struct DiagonalPoly {
  std::vector<double> g;
};
struct LinearEntry {
  std::vector<double> p1, p2;
};
struct GridSegment {
  std::vector<double> x, h1, h2, h3;
};
struct SingularSegment {
  double phi = 0;
};

struct Segment {
  double from = 0, to = 0;
  std::variant<ConstantDiagonal, DiagonalPoly, LinearEntry, GridSegment, SingularSegment> data;
};

struct Hamiltonian {
  std::vector<Segment> segments;
  double b() const { return segments.empty() ? 0.0 : segments.back().to; }
};

// Pointwise evaluation.  x is clamped into the segment partition; at interior
// segment boundaries the right segment wins (H is an a.e. object, the choice
// only matters for plotting).
SymMat2 eval(const Hamiltonian& h, double x);
SymMat2 eval_segment(const Segment& s, double x);

struct SingularInterval {
  double from = 0, to = 0;
  double phi = 0;  // direction angle in [0, pi)
};

struct ValidationReport {
  double b = 0;
  bool diagonal = false;          // h3 identically zero
  bool trace_normalized = false;  // trace identically one (within 1e-12)
  std::vector<SingularInterval> singular_intervals;
};

// Structural checks: throws EmptyDomain (b <= 0 or no segments),
// GapInPartition (segments do not tile [0, b] in order), or
// NonPositiveSemidefinite (sampled eigenvalue below -psd_tol).
ValidationReport validate(const Hamiltonian& h, double psd_tol = 1e-12);

// Integral of sqrt(det H) over [0, l]; throws SubspaceMismatch when l
// exceeds the domain.  This is the exponential type of the chamber at l.
double exponential_type(const Hamiltonian& h, double l);
inline double exponential_type(const Hamiltonian& h) { return exponential_type(h, h.b()); }

// Maximal intervals on which H is rank one (det below det_tol) with a fixed
// direction (angle variation below dir_tol).
std::vector<SingularInterval> detect_singular_intervals(const Hamiltonian& h,
                                                        double det_tol = 1e-10,
                                                        double dir_tol = 1e-8);

// Change of variable y(x) = integral of trace H making the trace identically
// one.  Segments whose trace is already one map through unchanged (exactly);
// the rest are resampled onto a grid in y.  The forward map is evaluated in
// closed form per segment; the inverse map uses bisection on the cumulative
// trace, as the trace may vanish on sets of measure zero.
struct TraceNormalized {
  Hamiltonian normalized;
  double y_of_x(double x) const;
  double x_of_y(double y) const;

  // Cumulative trace at original segment boundaries (internal to the maps).
  std::vector<double> x_bounds, y_bounds;
  Hamiltonian source_copy;
};

TraceNormalized trace_normalize(const Hamiltonian& h, int samples_per_segment = 512);

// JSON (de)serialization.  Throws ConfigError on malformed input.
Hamiltonian hamiltonian_from_json(const std::string& text);
std::string hamiltonian_to_json(const Hamiltonian& h);

// Convenience builders used across tests and the CLI.
Hamiltonian make_constant(double g0, double b);
Hamiltonian make_airy(double b);  // H = diag(1, x) on [0, b]

}  // namespace dbs
