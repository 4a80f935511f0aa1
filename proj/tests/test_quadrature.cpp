#include <cmath>
#include <complex>

#include <doctest.h>

#include "dbs/quadrature.hpp"

using dbs::Complex;

TEST_CASE("gauss rule integrates polynomials of degree 2n-1 exactly") {
  const auto& r = dbs::gauss_rule(16);
  REQUIRE(r.nodes.size() == 16);
  // integral of x^30 over [-1, 1] = 2/31
  double s = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    s += r.weights[i] * std::pow(r.nodes[i], 30);
  CHECK(s == doctest::Approx(2.0 / 31.0).epsilon(1e-14));
  // nodes are symmetric, weights positive and sum to 2
  double wsum = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    CHECK(r.weights[i] > 0);
    CHECK(r.nodes[i] == doctest::Approx(-r.nodes[r.nodes.size() - 1 - i]).epsilon(1e-15));
    wsum += r.weights[i];
  }
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("adaptive integration: smooth integrands") {
  dbs::QuadOptions opt;
  const double v = dbs::integrate([](double x) { return std::exp(x); }, 0.0, 1.0, opt);
  CHECK(v == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));

  const double w =
      dbs::integrate([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0, opt);
  CHECK(w == doctest::Approx(M_PI / 4).epsilon(1e-13));
}

TEST_CASE("adaptive integration: oscillatory integrand with seeding") {
  const double k = 200.0;
  dbs::QuadOptions opt;
  opt.osc_scale = M_PI / k;
  const double v = dbs::integrate([&](double x) { return std::sin(k * x); }, 0.0, 1.0, opt);
  CHECK(v == doctest::Approx((1.0 - std::cos(k)) / k).epsilon(1e-11));
}

TEST_CASE("adaptive integration: complex-valued integrands") {
  dbs::QuadOptions opt;
  const Complex z(0.3, 1.7);
  const Complex v =
      dbs::integrate([&](double x) { return std::exp(z * x); }, 0.0, 2.0, opt);
  const Complex exact = (std::exp(z * 2.0) - 1.0) / z;
  CHECK(std::abs(v - exact) < 1e-12 * std::abs(exact));
}

TEST_CASE("adaptive integration: kink handled by refinement") {
  dbs::QuadOptions opt;
  const double v = dbs::integrate([](double x) { return std::abs(x - 0.317); }, 0.0, 1.0, opt);
  const double a = 0.317;
  const double exact = (a * a + (1 - a) * (1 - a)) / 2;
  CHECK(v == doctest::Approx(exact).epsilon(1e-10));
}
