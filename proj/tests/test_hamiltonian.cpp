#include <cmath>
#include <vector>

#include <doctest.h>

#include "dbs/hamiltonian.hpp"

using dbs::Errc;
using dbs::Error;
using dbs::Hamiltonian;
using dbs::Segment;

namespace {

dbs::Hamiltonian grid_example() {
  // piecewise-linear H on [0, 1]: h1 = 0.6 + 0.2 sin(x), h2 = 0.4, h3 = 0.1 x
  dbs::GridSegment g;
  const int n = 11;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / (n - 1);
    g.x.push_back(x);
    g.h1.push_back(0.6 + 0.2 * std::sin(x));
    g.h2.push_back(0.4);
    g.h3.push_back(0.1 * x);
  }
  return Hamiltonian{{Segment{0.0, 1.0, g}}};
}

}  // namespace

TEST_CASE("validate accepts constant H and reports structure") {
  const auto h = dbs::make_constant(0.3, 2.0);
  const auto rep = dbs::validate(h);
  CHECK(rep.b == doctest::Approx(2.0));
  CHECK(rep.diagonal);
  CHECK(rep.trace_normalized);
  CHECK(rep.singular_intervals.empty());
}

TEST_CASE("validate rejects broken partitions and indefinite matrices") {
  SUBCASE("empty") {
    Hamiltonian h;
    CHECK_THROWS_AS(dbs::validate(h), Error);
  }
  SUBCASE("gap") {
    Hamiltonian h;
    h.segments.push_back({0.0, 1.0, dbs::ConstantDiagonal{0.0}});
    h.segments.push_back({1.5, 2.0, dbs::ConstantDiagonal{0.0}});
    try {
      dbs::validate(h);
      FAIL("expected GapInPartition");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::GapInPartition);
    }
  }
  SUBCASE("not PSD") {
    const auto h = dbs::make_constant(0.6, 1.0);  // h2 = -0.1
    try {
      dbs::validate(h);
      FAIL("expected NonPositiveSemidefinite");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NonPositiveSemidefinite);
    }
  }
}

TEST_CASE("eval interpolates grid segments") {
  const auto h = grid_example();
  const auto rep = dbs::validate(h);
  CHECK_FALSE(rep.diagonal);
  CHECK_FALSE(rep.trace_normalized);
  const auto m = dbs::eval(h, 0.35);
  CHECK(m.h2 == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(m.h3 == doctest::Approx(0.035).epsilon(1e-12));
  // piecewise-linear between nodes 0.3 and 0.4
  const double v3 = 0.6 + 0.2 * std::sin(0.3), v4 = 0.6 + 0.2 * std::sin(0.4);
  CHECK(m.h1 == doctest::Approx(0.5 * (v3 + v4)).epsilon(1e-12));
}

TEST_CASE("singular interval detection finds rank-one runs") {
  Hamiltonian h;
  h.segments.push_back({0.0, 1.0, dbs::ConstantDiagonal{0.0}});
  h.segments.push_back({1.0, 1.5, dbs::SingularSegment{0.3}});
  h.segments.push_back({1.5, 1.75, dbs::SingularSegment{0.3}});
  h.segments.push_back({1.75, 2.5, dbs::ConstantDiagonal{0.1}});
  const auto iv = dbs::detect_singular_intervals(h);
  REQUIRE(iv.size() == 1);
  CHECK(iv[0].from == doctest::Approx(1.0));
  CHECK(iv[0].to == doctest::Approx(1.75));  // adjacent equal directions merge
  CHECK(iv[0].phi == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("diag(1, 0) counts as singular with direction 0") {
  Hamiltonian h;
  h.segments.push_back({0.0, 1.0, dbs::ConstantDiagonal{0.5}});
  const auto iv = dbs::detect_singular_intervals(h);
  REQUIRE(iv.size() == 1);
  CHECK(iv[0].phi == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(iv[0].from == doctest::Approx(0.0));
  CHECK(iv[0].to == doctest::Approx(1.0));
}

TEST_CASE("exponential type integrates sqrt(det H)") {
  // constant: kappa * length with kappa = sqrt(1/4 - g0^2)
  const auto h = dbs::make_constant(0.3, 2.0);
  CHECK(dbs::exponential_type(h) == doctest::Approx(2.0 * std::sqrt(0.25 - 0.09)).epsilon(1e-12));
  CHECK(dbs::exponential_type(h, 0.5) ==
        doctest::Approx(0.5 * std::sqrt(0.16)).epsilon(1e-12));

  // diag(1, x) on [0, b]: integral of sqrt(x) = (2/3) b^{3/2}
  const auto ha = dbs::make_airy(1.0);
  CHECK(dbs::exponential_type(ha) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));

  // singular H contributes zero type
  Hamiltonian hs;
  hs.segments.push_back({0.0, 3.0, dbs::SingularSegment{1.1}});
  CHECK(dbs::exponential_type(hs) == doctest::Approx(0.0));

  CHECK_THROWS_AS(dbs::exponential_type(ha, 1.5), Error);
}

TEST_CASE("trace normalization: diag(2, 0) becomes diag(1, 0) with y = 2x") {
  Hamiltonian h;
  h.segments.push_back({0.0, 1.0, dbs::LinearEntry{{2.0}, {0.0}}});
  const auto tn = dbs::trace_normalize(h);
  CHECK(tn.normalized.b() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(tn.y_of_x(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tn.x_of_y(1.0) == doctest::Approx(0.5).epsilon(1e-10));
  const auto m = dbs::eval(tn.normalized, 0.7);
  CHECK(m.h1 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(m.h2 == doctest::Approx(0.0).epsilon(1e-10));
  const auto rep = dbs::validate(tn.normalized);
  CHECK(rep.trace_normalized);
}

TEST_CASE("trace normalization preserves exponential type") {
  const auto h = grid_example();
  const auto tn = dbs::trace_normalize(h);
  const auto rep = dbs::validate(tn.normalized);
  CHECK(rep.trace_normalized);
  CHECK(dbs::exponential_type(tn.normalized) ==
        doctest::Approx(dbs::exponential_type(h)).epsilon(1e-5));
  // forward/inverse maps are mutual inverses
  for (double y : {0.1, 0.33, 0.62, 0.9}) {
    const double ymax = tn.y_bounds.back();
    CHECK(tn.y_of_x(tn.x_of_y(y * ymax)) == doctest::Approx(y * ymax).epsilon(1e-9));
  }
  // trace-one H maps through unchanged
  const auto hc = dbs::make_constant(0.2, 1.5);
  const auto tc = dbs::trace_normalize(hc);
  CHECK(tc.normalized.b() == doctest::Approx(1.5));
  CHECK(dbs::eval(tc.normalized, 0.4).h1 == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("JSON round trip") {
  Hamiltonian h;
  h.segments.push_back({0.0, 0.5, dbs::ConstantDiagonal{0.25}});
  h.segments.push_back({0.5, 1.0, dbs::DiagonalPoly{{0.1, -0.2, 0.05}}});
  h.segments.push_back({1.0, 1.5, dbs::LinearEntry{{1.0, 0.5}, {0.2}}});
  dbs::GridSegment g;
  g.x = {1.5, 1.8, 2.0};
  g.h1 = {0.5, 0.6, 0.4};
  g.h2 = {0.5, 0.4, 0.6};
  g.h3 = {0.0, 0.05, -0.05};
  h.segments.push_back({1.5, 2.0, g});
  h.segments.push_back({2.0, 2.25, dbs::SingularSegment{0.8}});

  const std::string text = dbs::hamiltonian_to_json(h);
  const auto h2 = dbs::hamiltonian_from_json(text);
  REQUIRE(h2.segments.size() == h.segments.size());
  for (double x : {0.1, 0.6, 1.2, 1.65, 1.9, 2.1}) {
    const auto a = dbs::eval(h, x), b = dbs::eval(h2, x);
    CHECK(a.h1 == doctest::Approx(b.h1).epsilon(1e-15));
    CHECK(a.h2 == doctest::Approx(b.h2).epsilon(1e-15));
    CHECK(a.h3 == doctest::Approx(b.h3).epsilon(1e-15));
  }

  CHECK_THROWS_AS(dbs::hamiltonian_from_json("{not json"), Error);
  CHECK_THROWS_AS(dbs::hamiltonian_from_json("{\"segments\": [{\"type\": \"nope\"}]}"), Error);
}
