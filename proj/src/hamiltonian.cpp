#include "dbs/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "dbs/quadrature.hpp"

namespace dbs {

namespace {

double poly_eval(const std::vector<double>& c, double x) {
  double v = 0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

std::vector<double> poly_antiderivative(const std::vector<double>& c) {
  std::vector<double> a(c.size() + 1, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) a[i + 1] = c[i] / static_cast<double>(i + 1);
  return a;
}

// Coefficients of p(y + delta) given those of p(x); used to keep polynomial
// segments exact under the trace-normalizing change of variable.
std::vector<double> poly_shift(const std::vector<double>& c, double delta) {
  std::vector<double> out(c.size(), 0.0);
  for (std::size_t k = c.size(); k-- > 0;) {
    // Horner in the shifted variable: out <- out * (y + delta) + c[k].
    for (std::size_t i = out.size(); i-- > 1;) out[i] = out[i - 1] + delta * out[i];
    out[0] = delta * out[0];
    out[0] += c[k];
  }
  return out;
}

double min_eigenvalue(const SymMat2& m) {
  const double d = std::hypot(m.h1 - m.h2, 2 * m.h3);
  return 0.5 * (m.h1 + m.h2 - d);
}

// Principal-axis angle of a (near) rank-one symmetric matrix, in [0, pi).
double direction_angle(const SymMat2& m) {
  double phi = 0.5 * std::atan2(2 * m.h3, m.h1 - m.h2);
  if (phi < 0) phi += M_PI;
  if (phi >= M_PI) phi -= M_PI;
  return phi;
}

double angle_dist_mod_pi(double a, double b) {
  double d = std::fmod(std::abs(a - b), M_PI);
  return std::min(d, M_PI - d);
}

int sample_count(const Segment& s) {
  if (std::holds_alternative<ConstantDiagonal>(s.data) ||
      std::holds_alternative<SingularSegment>(s.data))
    return 2;
  if (const auto* g = std::get_if<GridSegment>(&s.data))
    return std::max<int>(2049, static_cast<int>(8 * g->x.size()));
  return 2049;
}

}  // namespace

SymMat2 eval_segment(const Segment& s, double x) {
  if (const auto* c = std::get_if<ConstantDiagonal>(&s.data))
    return {0.5 + c->g0, 0.5 - c->g0, 0.0};
  if (const auto* p = std::get_if<DiagonalPoly>(&s.data)) {
    const double g = poly_eval(p->g, x);
    return {0.5 + g, 0.5 - g, 0.0};
  }
  if (const auto* p = std::get_if<LinearEntry>(&s.data))
    return {poly_eval(p->p1, x), poly_eval(p->p2, x), 0.0};
  if (const auto* g = std::get_if<GridSegment>(&s.data)) {
    const auto& xs = g->x;
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = (it == xs.begin()) ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    if (i + 1 >= xs.size()) i = xs.size() - 2;
    const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    const double tc = std::clamp(t, 0.0, 1.0);
    auto lerp = [&](const std::vector<double>& v) { return v[i] + tc * (v[i + 1] - v[i]); };
    return {lerp(g->h1), lerp(g->h2), lerp(g->h3)};
  }
  const auto& sg = std::get<SingularSegment>(s.data);
  const double c = std::cos(sg.phi), sn = std::sin(sg.phi);
  return {c * c, sn * sn, c * sn};
}

SymMat2 eval(const Hamiltonian& h, double x) {
  if (h.segments.empty()) throw Error(Errc::EmptyDomain, "no segments");
  for (const auto& s : h.segments)
    if (x < s.to || &s == &h.segments.back()) return eval_segment(s, std::clamp(x, s.from, s.to));
  return eval_segment(h.segments.back(), h.b());
}

ValidationReport validate(const Hamiltonian& h, double psd_tol) {
  if (h.segments.empty() || !(h.b() > 0))
    throw Error(Errc::EmptyDomain, "domain [0, b] requires b > 0 and at least one segment");
  const double b = h.b();
  const double join_tol = 1e-12 * std::max(1.0, b);
  if (std::abs(h.segments.front().from) > join_tol)
    throw Error(Errc::GapInPartition, "first segment must start at 0");
  for (std::size_t i = 0; i < h.segments.size(); ++i) {
    const auto& s = h.segments[i];
    if (!(s.to > s.from)) throw Error(Errc::GapInPartition, "segment with nonpositive length");
    if (i > 0 && std::abs(s.from - h.segments[i - 1].to) > join_tol)
      throw Error(Errc::GapInPartition, "segments do not tile the domain contiguously");
    if (const auto* g = std::get_if<GridSegment>(&s.data)) {
      if (g->x.size() < 2 || g->h1.size() != g->x.size() || g->h2.size() != g->x.size() ||
          g->h3.size() != g->x.size())
        throw Error(Errc::ConfigError, "grid segment arrays must share a length >= 2");
      if (std::abs(g->x.front() - s.from) > join_tol || std::abs(g->x.back() - s.to) > join_tol)
        throw Error(Errc::GapInPartition, "grid nodes must span the segment");
      for (std::size_t k = 1; k < g->x.size(); ++k)
        if (!(g->x[k] > g->x[k - 1]))
          throw Error(Errc::ConfigError, "grid nodes must be strictly increasing");
    }
  }

  ValidationReport rep;
  rep.b = b;
  rep.diagonal = true;
  rep.trace_normalized = true;
  for (const auto& s : h.segments) {
    const int n = sample_count(s);
    for (int k = 0; k < n; ++k) {
      const double x = s.from + (s.to - s.from) * k / (n - 1);
      const SymMat2 m = eval_segment(s, x);
      if (min_eigenvalue(m) < -psd_tol)
        throw Error(Errc::NonPositiveSemidefinite,
                    "weight matrix has a negative eigenvalue near x = " + std::to_string(x));
      if (std::abs(m.h3) > 1e-14) rep.diagonal = false;
      if (std::abs(m.trace() - 1.0) > 1e-12) rep.trace_normalized = false;
    }
  }
  rep.singular_intervals = detect_singular_intervals(h);
  return rep;
}

std::vector<SingularInterval> detect_singular_intervals(const Hamiltonian& h, double det_tol,
                                                        double dir_tol) {
  std::vector<SingularInterval> out;
  auto push_or_merge = [&](SingularInterval iv) {
    if (!out.empty() && std::abs(out.back().to - iv.from) <= 1e-12 * std::max(1.0, h.b()) &&
        angle_dist_mod_pi(out.back().phi, iv.phi) <= dir_tol) {
      out.back().to = iv.to;
    } else {
      out.push_back(iv);
    }
  };

  for (const auto& s : h.segments) {
    if (const auto* sg = std::get_if<SingularSegment>(&s.data)) {
      double phi = std::fmod(sg->phi, M_PI);
      if (phi < 0) phi += M_PI;
      push_or_merge({s.from, s.to, phi});
      continue;
    }
    if (const auto* c = std::get_if<ConstantDiagonal>(&s.data)) {
      if (0.25 - c->g0 * c->g0 < det_tol)
        push_or_merge({s.from, s.to, c->g0 > 0 ? 0.0 : M_PI / 2});
      continue;
    }
    // Sampled detection for the remaining kinds.
    const int n = sample_count(s);
    int run_start = -1;
    double phi_min = 0, phi_max = 0;
    auto flush = [&](int run_end) {
      if (run_start >= 0 && run_end - run_start >= 1 && phi_max - phi_min <= dir_tol) {
        const double x0 = s.from + (s.to - s.from) * run_start / (n - 1);
        const double x1 = s.from + (s.to - s.from) * run_end / (n - 1);
        push_or_merge({x0, x1, 0.5 * (phi_min + phi_max)});
      }
      run_start = -1;
    };
    for (int k = 0; k < n; ++k) {
      const double x = s.from + (s.to - s.from) * k / (n - 1);
      const SymMat2 m = eval_segment(s, x);
      if (m.det() < det_tol && m.trace() > det_tol) {
        double phi = direction_angle(m);
        if (run_start < 0) {
          run_start = k;
          phi_min = phi_max = phi;
        } else {
          // Track the angle spread, unwrapping across the 0 ~ pi seam.
          if (phi - phi_min > M_PI / 2) phi -= M_PI;
          if (phi_min - phi > M_PI / 2) phi += M_PI;
          phi_min = std::min(phi_min, phi);
          phi_max = std::max(phi_max, phi);
        }
      } else {
        flush(k - 1);
      }
    }
    flush(n - 1);
  }
  return out;
}

double exponential_type(const Hamiltonian& h, double l) {
  if (h.segments.empty()) throw Error(Errc::EmptyDomain, "no segments");
  if (l < 0) throw Error(Errc::EmptyDomain, "negative subspace bound");
  if (l > h.b() + 1e-9 * std::max(1.0, h.b()))
    throw Error(Errc::SubspaceMismatch, "subspace bound exceeds the domain endpoint");
  l = std::min(l, h.b());

  double total = 0;
  QuadOptions opt;
  for (const auto& s : h.segments) {
    const double hi = std::min(s.to, l);
    if (hi <= s.from) break;
    if (const auto* c = std::get_if<ConstantDiagonal>(&s.data)) {
      total += std::sqrt(std::max(0.25 - c->g0 * c->g0, 0.0)) * (hi - s.from);
    } else if (std::holds_alternative<SingularSegment>(s.data)) {
      // rank one: contributes nothing
    } else {
      total += integrate(
          [&](double x) { return std::sqrt(std::max(eval_segment(s, x).det(), 0.0)); }, s.from,
          hi, opt);
    }
  }
  return total;
}

namespace {

// Cumulative trace over one segment from s.from to x, exact per kind.
double segment_cumtrace(const Segment& s, double x) {
  if (std::holds_alternative<ConstantDiagonal>(s.data) ||
      std::holds_alternative<DiagonalPoly>(s.data) ||
      std::holds_alternative<SingularSegment>(s.data))
    return x - s.from;  // trace is identically one
  if (const auto* p = std::get_if<LinearEntry>(&s.data)) {
    std::vector<double> tr(std::max(p->p1.size(), p->p2.size()), 0.0);
    for (std::size_t i = 0; i < p->p1.size(); ++i) tr[i] += p->p1[i];
    for (std::size_t i = 0; i < p->p2.size(); ++i) tr[i] += p->p2[i];
    const auto anti = poly_antiderivative(tr);
    return poly_eval(anti, x) - poly_eval(anti, s.from);
  }
  const auto& g = std::get<GridSegment>(s.data);
  double acc = 0;
  for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
    const double x0 = g.x[i], x1 = g.x[i + 1];
    if (x <= x0) break;
    const double t0 = g.h1[i] + g.h2[i], t1 = g.h1[i + 1] + g.h2[i + 1];
    const double xe = std::min(x, x1);
    const double u = (xe - x0) / (x1 - x0);
    // integral of the linear interpolant of the trace over [x0, xe]
    acc += (x1 - x0) * (t0 * u + 0.5 * (t1 - t0) * u * u);
  }
  return acc;
}

}  // namespace

double TraceNormalized::y_of_x(double x) const {
  const Hamiltonian& h = source_copy;
  x = std::clamp(x, 0.0, h.b());
  for (std::size_t i = 0; i < h.segments.size(); ++i) {
    const auto& s = h.segments[i];
    if (x <= s.to || i + 1 == h.segments.size())
      return y_bounds[i] + segment_cumtrace(s, std::clamp(x, s.from, s.to));
  }
  return y_bounds.back();
}

double TraceNormalized::x_of_y(double y) const {
  const double ymax = y_bounds.back();
  y = std::clamp(y, 0.0, ymax);
  double lo = 0, hi = x_bounds.back();
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (y_of_x(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

TraceNormalized trace_normalize(const Hamiltonian& h, int samples_per_segment) {
  validate(h);
  TraceNormalized tn;
  tn.source_copy = h;

  tn.x_bounds.push_back(0);
  tn.y_bounds.push_back(0);
  for (const auto& s : h.segments) {
    tn.x_bounds.push_back(s.to);
    tn.y_bounds.push_back(tn.y_bounds.back() + segment_cumtrace(s, s.to));
  }

  for (std::size_t i = 0; i < h.segments.size(); ++i) {
    const auto& s = h.segments[i];
    const double y0 = tn.y_bounds[i], y1 = tn.y_bounds[i + 1];
    Segment ns;
    ns.from = y0;
    ns.to = y1;
    if (std::holds_alternative<ConstantDiagonal>(s.data) ||
        std::holds_alternative<SingularSegment>(s.data)) {
      ns.data = s.data;  // already trace one; y differs from x by a shift only
      tn.normalized.segments.push_back(ns);
      continue;
    }
    if (const auto* p = std::get_if<DiagonalPoly>(&s.data)) {
      // trace one, y = x + (y0 - s.from): re-center the polynomial in y.
      DiagonalPoly np;
      np.g = poly_shift(p->g, s.from - y0);
      ns.data = np;
      tn.normalized.segments.push_back(ns);
      continue;
    }
    if (!(y1 > y0)) continue;  // trace vanished identically: no mass, no y-extent
    GridSegment ng;
    const int n = std::max(2, samples_per_segment);
    ng.x.resize(n + 1);
    ng.h1.resize(n + 1);
    ng.h2.resize(n + 1);
    ng.h3.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double y = y0 + (y1 - y0) * k / n;
      ng.x[k] = y;
      const double x = tn.x_of_y(y);
      SymMat2 m = eval_segment(s, std::clamp(x, s.from, s.to));
      const double tr = m.trace();
      if (tr > 1e-300) {
        ng.h1[k] = m.h1 / tr;
        ng.h2[k] = m.h2 / tr;
        ng.h3[k] = m.h3 / tr;
      } else {
        ng.h1[k] = 0.5;
        ng.h2[k] = 0.5;
        ng.h3[k] = 0.0;
      }
    }
    ng.x.front() = y0;
    ng.x.back() = y1;
    ns.data = ng;
    tn.normalized.segments.push_back(ns);
  }
  return tn;
}

Hamiltonian make_constant(double g0, double b) {
  Hamiltonian h;
  h.segments.push_back({0.0, b, ConstantDiagonal{g0}});
  return h;
}

Hamiltonian make_airy(double b) {
  Hamiltonian h;
  h.segments.push_back({0.0, b, LinearEntry{{1.0}, {0.0, 1.0}}});
  return h;
}

namespace {

using nlohmann::json;

std::vector<double> get_array(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array())
    throw Error(Errc::ConfigError, std::string("expected numeric array '") + key + "'");
  std::vector<double> v;
  for (const auto& e : j[key]) {
    if (!e.is_number()) throw Error(Errc::ConfigError, std::string("non-numeric entry in '") + key + "'");
    v.push_back(e.get<double>());
  }
  return v;
}

double get_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw Error(Errc::ConfigError, std::string("expected number '") + key + "'");
  return j[key].get<double>();
}

}  // namespace

Hamiltonian hamiltonian_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw Error(Errc::ConfigError, std::string("JSON parse failure: ") + e.what());
  }
  const json& root = j.contains("hamiltonian") ? j["hamiltonian"] : j;
  if (!root.contains("segments") || !root["segments"].is_array())
    throw Error(Errc::ConfigError, "hamiltonian requires a 'segments' array");
  Hamiltonian h;
  for (const auto& sj : root["segments"]) {
    Segment s;
    s.from = get_number(sj, "from");
    s.to = get_number(sj, "to");
    const std::string type = sj.value("type", "");
    if (type == "constant") {
      s.data = ConstantDiagonal{get_number(sj, "g0")};
    } else if (type == "diagonal_poly") {
      s.data = DiagonalPoly{get_array(sj, "g")};
    } else if (type == "linear_entry") {
      s.data = LinearEntry{get_array(sj, "p1"), get_array(sj, "p2")};
    } else if (type == "grid") {
      s.data = GridSegment{get_array(sj, "x"), get_array(sj, "h1"), get_array(sj, "h2"),
                           get_array(sj, "h3")};
    } else if (type == "singular") {
      s.data = SingularSegment{get_number(sj, "phi")};
    } else {
      throw Error(Errc::ConfigError, "unknown segment type '" + type + "'");
    }
    h.segments.push_back(std::move(s));
  }
  return h;
}

std::string hamiltonian_to_json(const Hamiltonian& h) {
  json segs = json::array();
  for (const auto& s : h.segments) {
    json sj;
    sj["from"] = s.from;
    sj["to"] = s.to;
    if (const auto* c = std::get_if<ConstantDiagonal>(&s.data)) {
      sj["type"] = "constant";
      sj["g0"] = c->g0;
    } else if (const auto* p = std::get_if<DiagonalPoly>(&s.data)) {
      sj["type"] = "diagonal_poly";
      sj["g"] = p->g;
    } else if (const auto* p = std::get_if<LinearEntry>(&s.data)) {
      sj["type"] = "linear_entry";
      sj["p1"] = p->p1;
      sj["p2"] = p->p2;
    } else if (const auto* g = std::get_if<GridSegment>(&s.data)) {
      sj["type"] = "grid";
      sj["x"] = g->x;
      sj["h1"] = g->h1;
      sj["h2"] = g->h2;
      sj["h3"] = g->h3;
    } else {
      sj["type"] = "singular";
      sj["phi"] = std::get<SingularSegment>(s.data).phi;
    }
    segs.push_back(sj);
  }
  json root;
  root["segments"] = segs;
  return root.dump(2);
}

}  // namespace dbs
