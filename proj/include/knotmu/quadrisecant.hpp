#pragma once

// Alternating quadrisecants of polygonal long knots: four-line transversals
// in Pluecker coordinates, the (3,1,4,2) pattern filter and the signed count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "knotmu/error.hpp"
#include "knotmu/geom.hpp"
#include "knotmu/knot.hpp"

namespace knotmu {

/// A segment a + s*dir with s in [0,1], or a ray (s >= 0, dir of unit length).
struct Segment3 {
  Point3 a;
  Point3 dir;
  bool ray = false;
};

struct TransversalHit {
  double s = 0;         // parameter on the segment
  double lambda = 0;    // parameter along the line
  Point3 at;
  double residual = 0;  // distance from the hit point to the line
  bool near_end = false;
};

struct Transversal {
  Point3 point;
  Point3 direction;  // unit
  std::array<TransversalHit, 4> hits;
  bool near_double = false;
};

/// Common transversals of the four supporting lines that hit every segment
/// (endpoint_tol margin). Throws DegenerateConfiguration when the incidence
/// system has rank below 4 or its quadratic vanishes identically.
inline std::vector<Transversal> line_transversals(const std::array<Segment3, 4>& segs, const Tolerance& tol = {}) {
  using V6 = std::array<double, 6>;
  auto dot6 = [](const V6& a, const V6& b) {
    double s = 0;
    for (int i = 0; i < 6; ++i) s += a[i] * b[i];
    return s;
  };
  auto unit6 = [&](V6& a) {
    const double n = std::sqrt(dot6(a, a));
    for (auto& x : a) x /= n;
    return n;
  };
  // A line (d, m) meets line i iff d . m_i + m . d_i = 0.
  std::vector<V6> basis;
  for (const auto& sg : segs) {
    const Point3 d = normalized(sg.dir), m = cross(sg.a, d);
    V6 r{m.x, m.y, m.z, d.x, d.y, d.z};
    unit6(r);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        const double c = dot6(r, b);
        for (int i = 0; i < 6; ++i) r[i] -= c * b[i];
      }
    if (unit6(r) < 1e-9) {
      // Four parallel lines: a transversal lies in a plane through all of them.
      bool parallel = true;
      const Point3 d0 = normalized(segs[0].dir);
      for (const auto& o : segs) parallel = parallel && norm(cross(normalized(o.dir), d0)) < 1e-9;
      if (!parallel) throw DegenerateConfiguration("incidence system has rank below 4");
      const Point3 n = cross(d0, segs[1].a - segs[0].a);
      if (norm(n) < tol.sep_tol) throw DegenerateConfiguration("coincident supporting lines");
      const Point3 nu = normalized(n);
      if (std::abs(dot(nu, segs[2].a - segs[0].a)) < tol.sep_tol && std::abs(dot(nu, segs[3].a - segs[0].a)) < tol.sep_tol)
        throw DegenerateConfiguration("coplanar parallel supporting lines");
      return {};
    }
    basis.push_back(r);
  }
  std::array<V6, 2> null;
  for (int k = 0; k < 2; ++k) {
    V6 best{};
    double best_norm = -1;
    for (int e = 0; e < 6; ++e) {
      V6 r{};
      r[e] = 1;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) {
          const double c = dot6(r, b);
          for (int i = 0; i < 6; ++i) r[i] -= c * b[i];
        }
      const double n = std::sqrt(dot6(r, r));
      if (n > best_norm) best_norm = n, best = r;
    }
    unit6(best);
    basis.push_back(best);
    null[k] = best;
  }
  const V6 &A = null[0], &B = null[1];
  auto klein = [](const V6& x, const V6& y) {  // polar form of d . m
    return 0.5 * (x[0] * y[3] + x[1] * y[4] + x[2] * y[5] + y[0] * x[3] + y[1] * x[4] + y[2] * x[5]);
  };
  const double qa = klein(A, A), qb = 2 * klein(A, B), qc = klein(B, B);
  const double scale = std::max({std::abs(qa), std::abs(qb), std::abs(qc)});
  if (scale < 1e-12) throw DegenerateConfiguration("incidence quadratic vanishes identically");
  const double disc = (qb * qb - 4 * qa * qc) / (scale * scale);
  const bool near_double = std::abs(disc) < 1e-9;
  if (disc < 0 && !near_double) return {};
  const double root = std::sqrt(std::max(disc, 0.0)) * scale;
  std::vector<std::pair<double, double>> ab;  // (alpha, beta)
  if (std::abs(qa) >= std::abs(qc)) {
    const double q = -0.5 * (qb + std::copysign(root, qb));
    ab.push_back({q / qa, 1});
    if (q != 0) ab.push_back({qc / q, 1});
  } else {
    const double q = -0.5 * (qb + std::copysign(root, qb));
    ab.push_back({1, q / qc});
    if (q != 0) ab.push_back({1, qa / q});
  }
  if (near_double) ab.resize(1);

  std::vector<Transversal> out;
  for (auto [al, be] : ab) {
    V6 x;
    for (int i = 0; i < 6; ++i) x[i] = al * A[i] + be * B[i];
    Point3 d{x[0], x[1], x[2]}, m{x[3], x[4], x[5]};
    const double dn = norm(d);
    if (dn < 1e-9 * std::sqrt(dot6(x, x))) continue;  // line at infinity
    const Point3 u = (1.0 / dn) * d;
    m = (1.0 / dn) * m;
    Transversal t;
    t.point = cross(u, m);
    t.direction = u;
    t.near_double = near_double;
    bool inside = true;
    for (int i = 0; i < 4 && inside; ++i) {
      const Segment3& sg = segs[i];
      // Closest approach of a + s dir and point + lambda u.
      const Point3 w = sg.a - t.point;
      const double aa = dot(sg.dir, sg.dir), bb = dot(sg.dir, u), dd = dot(sg.dir, w), ee = dot(u, w);
      const double den = aa - bb * bb;
      if (den < 1e-12 * aa) {  // parallel, or the supporting line itself: no isolated hit
        inside = false;
        break;
      }
      TransversalHit& h = t.hits[i];
      h.s = (bb * ee - dd) / den;
      h.lambda = (aa * ee - bb * dd) / den;
      h.at = sg.a + h.s * sg.dir;
      h.residual = distance(h.at, t.point + h.lambda * u);
      const double margin = tol.endpoint_tol;
      if (h.s < -margin || (!sg.ray && h.s > 1 + margin)) inside = false;
      h.near_end = std::abs(h.s) <= margin || (!sg.ray && std::abs(h.s - 1) <= margin);
    }
    if (inside) out.push_back(t);
  }
  return out;
}

struct Quadrisecant {
  Point3 point;
  Point3 direction;  // oriented so the hits read (3,1,4,2)
  std::array<double, 4> knot_params{};  // arclength, increasing
  std::array<std::size_t, 4> edges{};   // 0 is the incoming ray
  std::array<Point3, 4> hits{};
  std::array<double, 4> line_params{};
  std::array<int, 4> line_order{};      // 1-based knot indices in line order
  std::string pattern = "alternating";
  std::optional<int> sign;
};

struct QuadEvent {
  std::string kind;
  std::array<std::size_t, 4> edges{};
  std::string evidence;
};

struct QuadRetry {
  std::uint64_t seed = 0;
  double magnitude = 0;
  std::size_t events = 0;
};

struct QuadResult {
  std::vector<Quadrisecant> quadrisecants;
  bool signed_count = true;
  int total = 0;   // sum of signs; 0 when unsigned
  int parity = 0;  // count mod 2
  std::vector<QuadEvent> degeneracies;  // events of discarded runs
  std::vector<QuadRetry> retries;
};

class UnresolvedQuadDegeneracy : public DegenerateConfiguration {
 public:
  UnresolvedQuadDegeneracy(const std::string& what, std::vector<QuadEvent> events, std::vector<QuadRetry> retries)
      : DegenerateConfiguration(what), events(std::move(events)), retries(std::move(retries)) {}
  std::vector<QuadEvent> events;
  std::vector<QuadRetry> retries;
};

struct QuadOptions {
  bool compute_signs = true;
  int max_retries = 8;
  std::uint64_t seed_base = 0;
};

namespace detail {

// Calibration: the positive trefoil totals +1.
inline constexpr int kSignPin = -1;

struct KnotEdges {
  std::vector<Segment3> segs;
  std::vector<double> start;  // arclength at s = 0 (rays: at the axis vertex)
  std::vector<bool> on_axis;
};

inline KnotEdges knot_edges(const PolyKnot& k, const Tolerance& tol) {
  KnotEdges e;
  auto axis = [&](Point3 p) { return std::hypot(p.y, p.z) <= tol.eq_tol; };
  const Point3 first = k.vertices.front();
  e.segs.push_back({first, {-1, 0, 0}, true});
  e.start.push_back(0);
  e.on_axis.push_back(true);
  double len = 0;
  for (std::size_t i = 0; i + 1 < k.vertices.size(); ++i) {
    const Point3 a = k.vertices[i], b = k.vertices[i + 1];
    e.segs.push_back({a, b - a, false});
    e.start.push_back(len);
    e.on_axis.push_back(axis(a) && axis(b));
    len += distance(a, b);
  }
  e.segs.push_back({k.vertices.back(), {1, 0, 0}, true});
  e.start.push_back(len);
  e.on_axis.push_back(true);
  return e;
}

inline double knot_param(const KnotEdges& e, std::size_t i, double s) {
  if (i == 0) return -s;
  return e.start[i] + s * norm(e.segs[i].dir);
}

inline Point3 unit_tangent(const KnotEdges& e, std::size_t i) {
  return normalized(e.segs[i].dir);
}

inline double det4(std::array<std::array<double, 4>, 4> m) {
  double det = 1;
  for (int c = 0; c < 4; ++c) {
    int p = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    if (m[p][c] == 0) return 0;
    if (p != c) std::swap(m[p], m[c]), det = -det;
    det *= m[c][c];
    for (int r = c + 1; r < 4; ++r) {
      const double f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

/// Jacobian of the alignment map with respect to (s1..s4): rows are the
/// e1, e2 components of (P_j - P_1) x w for j = 3, 4, with w the unit vector
/// from P_1 to P_2 and (e1, e2, u) right-handed.
inline double alignment_jacobian(const std::array<Point3, 4>& tangents, const std::array<double, 4>& lambda,
                                 Point3 u) {
  const Point3 helper = std::abs(u.x) < 0.9 ? Point3{1, 0, 0} : Point3{0, 1, 0};
  const Point3 e1 = normalized(cross(helper, u)), e2 = cross(u, e1);
  const double L = lambda[1] - lambda[0];
  std::array<std::array<double, 4>, 4> m{};
  for (int jj = 0; jj < 2; ++jj) {
    const int j = 2 + jj;
    const double tau = (lambda[j] - lambda[0]) / L;
    const Point3 c1 = (tau - 1) * cross(tangents[0], u), c2 = -tau * cross(tangents[1], u),
                 cj = cross(tangents[j], u);
    for (int k = 0; k < 2; ++k) {
      const Point3 e = k == 0 ? e1 : e2;
      auto& row = m[2 * jj + k];
      row[0] = dot(c1, e);
      row[1] = dot(c2, e);
      row[j] = dot(cj, e);
    }
  }
  return det4(m);
}

struct QuadRun {
  std::vector<Quadrisecant> found;
  std::vector<QuadEvent> events;
};

inline QuadRun run_quad(const PolyKnot& k, const Tolerance& tol, bool compute_signs) {
  QuadRun run;
  const KnotEdges e = knot_edges(k, tol);
  const std::size_t m = e.segs.size();
  auto event = [&](std::string kind, std::array<std::size_t, 4> ed, std::string ev) {
    run.events.push_back({std::move(kind), ed, std::move(ev)});
  };
  std::array<std::size_t, 4> id{};
  for (id[0] = 0; id[0] < m; ++id[0])
    for (id[1] = id[0] + 1; id[1] < m; ++id[1])
      for (id[2] = id[1] + 1; id[2] < m; ++id[2])
        for (id[3] = id[2] + 1; id[3] < m; ++id[3]) {
          int axis = 0;
          for (auto i : id) axis += e.on_axis[i];
          if (axis >= 2) continue;  // only the axis itself meets two disjoint axis pieces
          std::vector<Transversal> lines;
          try {
            lines = line_transversals({e.segs[id[0]], e.segs[id[1]], e.segs[id[2]], e.segs[id[3]]}, tol);
          } catch (const DegenerateConfiguration& ex) {
            event("degenerate-quadruple", id, ex.what());
            continue;
          }
          for (const Transversal& t : lines) {
            bool trivial = false, at_end = false;
            for (int i = 0; i < 3; ++i)
              if (id[i + 1] == id[i] + 1 && t.hits[i].near_end && t.hits[i + 1].near_end &&
                  distance(t.hits[i].at, t.hits[i + 1].at) <= tol.sep_tol)
                trivial = true;
            if (trivial) continue;
            for (const auto& h : t.hits) at_end = at_end || h.near_end;
            if (at_end) {
              event("hit-at-vertex", id, "a transversal passes within endpoint_tol of a vertex");
              continue;
            }
            if (t.near_double) {
              event("near-double-root", id, "transversal quadratic has a near-double root");
              continue;
            }
            double worst = 0, closest = INFINITY;
            for (int i = 0; i < 4; ++i) {
              worst = std::max(worst, t.hits[i].residual);
              for (int j = i + 1; j < 4; ++j) closest = std::min(closest, distance(t.hits[i].at, t.hits[j].at));
            }
            if (worst > tol.eq_tol) {
              event("residual", id, "hit residual " + std::to_string(worst));
              continue;
            }
            if (closest < tol.sep_tol) {
              event("coincident-hits", id, "two hits closer than sep_tol");
              continue;
            }
            std::array<int, 4> order{0, 1, 2, 3};
            std::sort(order.begin(), order.end(),
                      [&](int a, int b) { return t.hits[a].lambda < t.hits[b].lambda; });
            const std::array<int, 4> fwd{2, 0, 3, 1}, rev{1, 3, 0, 2};
            if (order != fwd && order != rev) continue;
            const double dir = order == fwd ? 1.0 : -1.0;
            Quadrisecant q;
            q.direction = dir * t.direction;
            q.point = t.point;
            q.edges = id;
            q.line_order = {3, 1, 4, 2};
            std::array<Point3, 4> tangents;
            for (int i = 0; i < 4; ++i) {
              q.knot_params[i] = knot_param(e, id[i], t.hits[i].s);
              q.hits[i] = t.hits[i].at;
              q.line_params[i] = dir * t.hits[i].lambda;
              tangents[i] = unit_tangent(e, id[i]);
            }
            if (compute_signs) {
              const double det = alignment_jacobian(tangents, q.line_params, q.direction);
              if (std::abs(det) < tol.eq_tol) {
                event("small-jacobian", id, "alignment Jacobian " + std::to_string(det));
                continue;
              }
              q.sign = kSignPin * (det > 0 ? 1 : -1);
            }
            run.found.push_back(q);
          }
        }
  std::sort(run.found.begin(), run.found.end(),
            [](const Quadrisecant& a, const Quadrisecant& b) { return a.knot_params < b.knot_params; });
  return run;
}

}  // namespace detail

/// Alternating quadrisecants of k (closed input is opened first). Degenerate
/// runs are retried on perturbed copies, seeds seed_base + 1.., magnitude
/// 10 * endpoint_tol doubling per retry.
inline QuadResult alternating_quadrisecants(const PolyKnot& knot, const Tolerance& tol = {},
                                            const QuadOptions& opt = {}) {
  tol.check();
  validate_knot(knot, tol);
  const PolyKnot k = to_long(knot);
  validate_knot(k, tol);
  detail::QuadRun run = detail::run_quad(k, tol, opt.compute_signs);
  QuadResult out;
  for (int r = 1; !run.events.empty(); ++r) {
    out.degeneracies.insert(out.degeneracies.end(), run.events.begin(), run.events.end());
    if (r > opt.max_retries)
      throw UnresolvedQuadDegeneracy(
          "degeneracies persist after " + std::to_string(opt.max_retries) + " perturbation retries",
          std::move(out.degeneracies), std::move(out.retries));
    const std::uint64_t seed = opt.seed_base + static_cast<std::uint64_t>(r);
    const double magnitude = 10.0 * tol.endpoint_tol * std::ldexp(1.0, r - 1);
    run = detail::run_quad(perturb_knot(k, seed, magnitude), tol, opt.compute_signs);
    out.retries.push_back({seed, magnitude, run.events.size()});
  }
  out.quadrisecants = std::move(run.found);
  out.signed_count = opt.compute_signs;
  for (const auto& q : out.quadrisecants) out.total += q.sign.value_or(0);
  out.parity = static_cast<int>(out.quadrisecants.size() % 2);
  return out;
}

/// Sign of one quadrisecant of k, recomputed from its edges and hits.
inline int sign_of_quadrisecant(const PolyKnot& knot, const Quadrisecant& q, const Tolerance& tol = {}) {
  const PolyKnot k = to_long(knot);
  const detail::KnotEdges e = detail::knot_edges(k, tol);
  std::array<Point3, 4> tangents;
  for (int i = 0; i < 4; ++i) {
    if (q.edges[i] >= e.segs.size()) throw DomainError("quadrisecant edge index out of range");
    tangents[i] = detail::unit_tangent(e, q.edges[i]);
  }
  const double det = detail::alignment_jacobian(tangents, q.line_params, q.direction);
  if (std::abs(det) < tol.eq_tol) throw DegenerateConfiguration("alignment Jacobian below eq_tol");
  return detail::kSignPin * (det > 0 ? 1 : -1);
}

}  // namespace knotmu
