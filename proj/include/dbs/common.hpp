#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dbs {

using Complex = std::complex<double>;

// Error taxonomy shared by the library and the CLI.  Every library failure
// throws Error with one of these codes; the CLI maps config-shape problems
// to exit code 2 and numerical failures to exit code 3.
enum class Errc {
  NonPositiveSemidefinite,
  EmptyDomain,
  GapInPartition,
  StepUnderflow,
  NonDiagonalHamiltonian,
  FormMismatch,
  MonotonicityFailure,
  ExceptionalExtension,
  CoincidenceInstability,
  NonConstantRatio,
  SupportViolation,
  SubspaceMismatch,
  UnsupportedP,
  BranchMismatch,
  EnumerationGap,
  ConfigError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonPositiveSemidefinite: return "NonPositiveSemidefinite";
    case Errc::EmptyDomain: return "EmptyDomain";
    case Errc::GapInPartition: return "GapInPartition";
    case Errc::StepUnderflow: return "StepUnderflow";
    case Errc::NonDiagonalHamiltonian: return "NonDiagonalHamiltonian";
    case Errc::FormMismatch: return "FormMismatch";
    case Errc::MonotonicityFailure: return "MonotonicityFailure";
    case Errc::ExceptionalExtension: return "ExceptionalExtension";
    case Errc::CoincidenceInstability: return "CoincidenceInstability";
    case Errc::NonConstantRatio: return "NonConstantRatio";
    case Errc::SupportViolation: return "SupportViolation";
    case Errc::SubspaceMismatch: return "SubspaceMismatch";
    case Errc::UnsupportedP: return "UnsupportedP";
    case Errc::BranchMismatch: return "BranchMismatch";
    case Errc::EnumerationGap: return "EnumerationGap";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// 2-vectors and 2x2 matrices over a scalar field (double for real spectral
// parameters, Complex for general z).  Small enough that hand-rolled
// arithmetic beats any library dependency.
template <class S>
struct Vec2T {
  S x{}, y{};
};

template <class S>
struct Mat2T {
  S a{}, b{}, c{}, d{};  // [[a, b], [c, d]]

  static Mat2T identity() { return {S(1), S(0), S(0), S(1)}; }

  friend Mat2T operator*(const Mat2T& m, const Mat2T& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
  friend Vec2T<S> operator*(const Mat2T& m, const Vec2T<S>& v) {
    return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
  }
  friend Mat2T operator+(const Mat2T& m, const Mat2T& n) {
    return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d};
  }
  friend Mat2T operator*(S s, const Mat2T& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
  S det() const { return a * d - b * c; }
  S trace() const { return a + d; }
};

using Vec2 = Vec2T<double>;
using Vec2c = Vec2T<Complex>;
using Mat2 = Mat2T<double>;
using Mat2c = Mat2T<Complex>;

// Symmetric real 2x2 weight matrix [[h1, h3], [h3, h2]].
struct SymMat2 {
  double h1 = 0, h2 = 0, h3 = 0;
  double det() const { return h1 * h2 - h3 * h3; }
  double trace() const { return h1 + h2; }
};

// u' = z * Jmul(H) * u, where J = [[0,-1],[1,0]]:  J*[[h1,h3],[h3,h2]] =
// [[-h3,-h2],[h1,h3]].  The product is traceless, which is what makes the
// closed-form 2x2 exponential below possible.
template <class S>
inline Mat2T<S> jmul(const SymMat2& h, S z) {
  return {-z * h.h3, -z * h.h2, z * h.h1, z * h.h3};
}

// J-symplectic pairing u^T J v = u2*v1 - u1*v2  (J = [[0,-1],[1,0]]).
template <class S>
inline S jpair(const Vec2T<S>& u, const Vec2T<S>& v) {
  return u.y * v.x - u.x * v.y;
}

// Bilinear (not sesquilinear) weight form u^T H v.
template <class S>
inline S hform(const SymMat2& h, const Vec2T<S>& u, const Vec2T<S>& v) {
  return h.h1 * u.x * v.x + h.h3 * (u.x * v.y + u.y * v.x) + h.h2 * u.y * v.y;
}

}  // namespace dbs
