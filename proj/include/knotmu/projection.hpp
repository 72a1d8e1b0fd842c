#pragma once

// Planar projection of a closed polygonal knot along x3: based Gauss diagram
// and PD code.

#include <algorithm>
#include <cmath>
#include <vector>

#include "knotmu/conway.hpp"
#include "knotmu/error.hpp"
#include "knotmu/geom.hpp"
#include "knotmu/knot.hpp"

namespace knotmu {

struct ProjectedCrossing {
  double over_param = 0;   // segment index + fraction, base point at vertex 0
  double under_param = 0;
  int sign = 1;
};

/// Crossings of the projection to the (x1, x2)-plane. Throws
/// DegenerateConfiguration for crossings at vertices, overlapping segments
/// or strands at equal height.
inline std::vector<ProjectedCrossing> project_crossings(const PolyKnot& k, const Tolerance& tol = {}) {
  if (k.long_knot) throw UnsupportedInput("projection expects a closed knot");
  const std::size_t m = k.segment_count();
  std::vector<ProjectedCrossing> out;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (j == i + 1 || (i == 0 && j == m - 1)) continue;
      const Point3 p0 = k.segment_start(i), p1 = k.segment_end(i), q0 = k.segment_start(j), q1 = k.segment_end(j);
      const Point2 a{p0.x, p0.y}, u{p1.x - p0.x, p1.y - p0.y}, b{q0.x, q0.y}, v{q1.x - q0.x, q1.y - q0.y};
      const double den = cross(u, v);
      const Point2 w = b - a;
      if (std::abs(den) < tol.eq_tol * norm(u) * norm(v)) {
        if (std::abs(cross(w, u)) < tol.sep_tol * norm(u)) throw DegenerateConfiguration("projected segments overlap");
        continue;
      }
      const double s = cross(w, v) / den, t = cross(w, u) / den;
      const double e = tol.endpoint_tol;
      if (s < -e || s > 1 + e || t < -e || t > 1 + e) continue;
      if (s < e || s > 1 - e || t < e || t > 1 - e) throw DegenerateConfiguration("projected crossing at a vertex");
      const double zi = p0.z + s * (p1.z - p0.z), zj = q0.z + t * (q1.z - q0.z);
      if (std::abs(zi - zj) < tol.sep_tol) throw DegenerateConfiguration("strands meet in space");
      const bool i_over = zi > zj;
      const Point2 d_over = i_over ? u : v, d_under = i_over ? v : u;
      ProjectedCrossing c;
      c.over_param = i_over ? i + s : j + t;
      c.under_param = i_over ? j + t : i + s;
      c.sign = cross(d_over, d_under) > 0 ? 1 : -1;
      out.push_back(c);
    }
  return out;
}

/// Based Gauss diagram, base point at vertex 0.
inline GaussDiagram gauss_from_knot(const PolyKnot& k, const Tolerance& tol = {}) {
  const auto xs = project_crossings(k, tol);
  std::vector<double> params;
  for (const auto& c : xs) params.insert(params.end(), {c.over_param, c.under_param});
  std::sort(params.begin(), params.end());
  auto pos = [&](double p) { return static_cast<int>(std::lower_bound(params.begin(), params.end(), p) - params.begin()); };
  GaussDiagram gd;
  for (const auto& c : xs) gd.chords.push_back({pos(c.over_param), pos(c.under_param), c.sign});
  std::sort(gd.chords.begin(), gd.chords.end(),
            [](const GaussChord& a, const GaussChord& b) { return std::min(a.over, a.under) < std::min(b.over, b.under); });
  return gd;
}

/// PD code of a based Gauss diagram. Edge p+1 runs from passage p to
/// passage p+1 (edge 2n closes up through the base point).
inline PDCode pd_from_gauss(const GaussDiagram& gd) {
  gd.check();
  const int n2 = static_cast<int>(2 * gd.n());
  auto in = [&](int p) { return p == 0 ? n2 : p; };
  auto out = [&](int p) { return p + 1; };
  PDCode pd;
  for (const auto& c : gd.chords) {
    PDCrossing x;
    x.a = in(c.under);
    x.c = out(c.under);
    x.sign = c.sign;
    x.b = c.sign > 0 ? out(c.over) : in(c.over);
    x.d = c.sign > 0 ? in(c.over) : out(c.over);
    pd.crossings.push_back(x);
  }
  return pd;
}

}  // namespace knotmu
