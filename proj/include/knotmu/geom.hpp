#pragma once

// Planar piecewise-linear primitives: curves, univariate tracks, the
// separable two-equation solver and vertical-line queries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "knotmu/error.hpp"

namespace knotmu {

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend Point2 operator*(double k, Point2 a) { return {k * a.x1, k * a.x2}; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double norm(Point2 a) { return std::hypot(a.x1, a.x2); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline double cross(Point2 a, Point2 b) { return a.x1 * b.x2 - a.x2 * b.x1; }
inline double dot(Point2 a, Point2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
inline Point2 lerp(Point2 a, Point2 b, double s) { return a + s * (b - a); }

/// Numerical thresholds shared by every geometric predicate.
///
/// eq_tol bounds residuals of alignment equations, sep_tol is the minimum
/// distance at which two points count as distinct, endpoint_tol is the
/// parameter distance at which a solution is considered to sit on a cell
/// or edge boundary.
struct Tolerance {
  double eq_tol = 1e-9;
  double sep_tol = 1e-6;
  double endpoint_tol = 1e-6;

  void check() const {
    if (!(eq_tol > 0) || !(sep_tol > 0) || !(endpoint_tol > 0))
      throw DomainError("tolerances must be strictly positive");
    if (sep_tol < eq_tol) throw DomainError("sep_tol must be >= eq_tol");
  }
};

/// A polygonal curve in the plane, parameterized uniformly per vertex:
/// vertex i sits at t = i / segment_count().
struct PLCurve {
  std::vector<Point2> vertices;
  bool closed = true;

  std::size_t segment_count() const {
    if (vertices.size() < 2) return 0;
    return closed ? vertices.size() : vertices.size() - 1;
  }
  double vertex_param(std::size_t i) const {
    return static_cast<double>(i) / static_cast<double>(segment_count());
  }
  Point2 segment_start(std::size_t i) const { return vertices[i]; }
  Point2 segment_end(std::size_t i) const { return vertices[(i + 1) % vertices.size()]; }
};

namespace detail {

// Locates t (already inside the domain) on its segment.
inline std::pair<std::size_t, double> locate(const PLCurve& c, double t) {
  const std::size_t n = c.segment_count();
  double scaled = t * static_cast<double>(n);
  auto seg = static_cast<std::size_t>(std::floor(scaled));
  if (seg >= n) seg = n - 1;
  return {seg, scaled - static_cast<double>(seg)};
}

}  // namespace detail

/// Evaluates a curve at parameter t. Closed curves accept t in [0,1), open arcs
/// accept t in [0,1].
inline Point2 eval_curve(const PLCurve& c, double t) {
  if (c.segment_count() == 0) throw DomainError("curve has fewer than two vertices");
  const bool ok = c.closed ? (t >= 0.0 && t < 1.0) : (t >= 0.0 && t <= 1.0);
  if (!ok || !std::isfinite(t))
    throw DomainError("curve parameter " + std::to_string(t) + " outside its domain");
  auto [seg, frac] = detail::locate(c, t);
  return lerp(c.segment_start(seg), c.segment_end(seg), frac);
}

/// Like eval_curve but reduces t modulo 1 on closed curves and clamps on arcs.
inline Point2 eval_curve_wrapped(const PLCurve& c, double t) {
  if (c.closed) {
    t -= std::floor(t);
    if (t >= 1.0) t = 0.0;
  } else {
    t = std::clamp(t, 0.0, 1.0);
  }
  return eval_curve(c, t);
}

/// A univariate piecewise-linear function given by its breakpoints.
struct PLFunction {
  struct Breakpoint {
    double t;
    double value;
  };
  std::vector<Breakpoint> breakpoints;

  PLFunction() = default;
  explicit PLFunction(std::vector<Breakpoint> bps) : breakpoints(std::move(bps)) {
    if (breakpoints.size() < 2) throw DomainError("PLFunction needs at least two breakpoints");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
      if (!(breakpoints[i].t > breakpoints[i - 1].t))
        throw DomainError("PLFunction breakpoints must be strictly increasing");
  }

  double lo() const { return breakpoints.front().t; }
  double hi() const { return breakpoints.back().t; }

  double operator()(double t) const {
    if (t < lo() || t > hi()) throw DomainError("PLFunction evaluated outside its domain");
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t,
                               [](double x, const Breakpoint& b) { return x < b.t; });
    if (it == breakpoints.end()) return breakpoints.back().value;
    if (it == breakpoints.begin()) return breakpoints.front().value;
    const Breakpoint& b = *it;
    const Breakpoint& a = *(it - 1);
    return a.value + (b.value - a.value) * (t - a.t) / (b.t - a.t);
  }

  /// Exact [min, max] of the function over [a, b].
  std::pair<double, double> range(double a, double b) const {
    double va = (*this)(a), vb = (*this)(b);
    double mn = std::min(va, vb), mx = std::max(va, vb);
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), a,
                               [](double x, const Breakpoint& bp) { return x < bp.t; });
    for (; it != breakpoints.end() && it->t < b; ++it) {
      mn = std::min(mn, it->value);
      mx = std::max(mx, it->value);
    }
    return {mn, mx};
  }
};

namespace detail {

inline std::vector<double> merge_grid(const PLFunction& a, const PLFunction& b) {
  std::vector<double> g;
  g.reserve(a.breakpoints.size() + b.breakpoints.size());
  for (const auto& bp : a.breakpoints) g.push_back(bp.t);
  for (const auto& bp : b.breakpoints) g.push_back(bp.t);
  std::sort(g.begin(), g.end());
  std::vector<double> out;
  for (double t : g)
    if (out.empty() || t - out.back() > 1e-15) out.push_back(t);
  const double lo = std::max(a.lo(), b.lo()), hi = std::min(a.hi(), b.hi());
  std::vector<double> clipped;
  for (double t : out)
    if (t >= lo && t <= hi) clipped.push_back(t);
  return clipped;
}

inline bool near_grid_node(const std::vector<double>& grid, double x, double tol) {
  auto it = std::lower_bound(grid.begin(), grid.end(), x);
  if (it != grid.end() && *it - x <= tol) return true;
  if (it != grid.begin() && x - *(it - 1) <= tol) return true;
  return false;
}

// Midpoint of the part of {a*x + b*y = e} inside the unit square, if any.
inline bool clip_line_to_unit_square(double a, double b, double e, double& x, double& y) {
  std::vector<std::pair<double, double>> pts;
  auto try_pt = [&](double px, double py) {
    if (px >= -1e-12 && px <= 1 + 1e-12 && py >= -1e-12 && py <= 1 + 1e-12) pts.emplace_back(px, py);
  };
  if (std::abs(b) > 0) {
    try_pt(0.0, e / b);
    try_pt(1.0, (e - a) / b);
  }
  if (std::abs(a) > 0) {
    try_pt(e / a, 0.0);
    try_pt((e - b) / a, 1.0);
  }
  if (pts.empty()) return false;
  auto [mn, mx] = std::minmax_element(pts.begin(), pts.end());
  x = std::clamp(0.5 * (mn->first + mx->first), 0.0, 1.0);
  y = std::clamp(0.5 * (mn->second + mx->second), 0.0, 1.0);
  return true;
}

}  // namespace detail

/// A solution (s, t) of the separable system u(t) = v(s), w(s) = z(t).
struct PairSolution {
  double s = 0;
  double t = 0;
  bool singular = false;       // the cell's 2x2 system is (near) singular
  bool at_breakpoint = false;  // within endpoint_tol of a grid line (incl. 0 and 1)
  double residual_f = 0;       // |u(t) - v(s)|
  double residual_g = 0;       // |w(s) - z(t)|
};

/// Solves u(t) - v(s) = 0 and w(s) - z(t) = 0 exactly on every breakpoint cell.
///
/// Each cell of the merged s-grid (breakpoints of v and w) times the merged
/// t-grid (breakpoints of u and z) carries a linear 2x2 system. Cells whose
/// determinant in (s,t) units falls below eq_tol are reported once, flagged
/// singular, when their solution set meets the cell. Output is sorted by (s,t).
inline std::vector<PairSolution> solve_separable_pair(const PLFunction& u, const PLFunction& v,
                                                      const PLFunction& w, const PLFunction& z,
                                                      const Tolerance& tol = {}) {
  const std::vector<double> sg = detail::merge_grid(v, w);
  const std::vector<double> tg = detail::merge_grid(u, z);
  std::vector<PairSolution> raw;
  if (sg.size() < 2 || tg.size() < 2) return raw;

  std::vector<double> vs(sg.size()), ws(sg.size()), ut(tg.size()), zt(tg.size());
  for (std::size_t i = 0; i < sg.size(); ++i) {
    vs[i] = v(sg[i]);
    ws[i] = w(sg[i]);
  }
  for (std::size_t j = 0; j < tg.size(); ++j) {
    ut[j] = u(tg[j]);
    zt[j] = z(tg[j]);
  }
  const double slack = tol.eq_tol;

  for (std::size_t i = 0; i + 1 < sg.size(); ++i) {
    const double ds = sg[i + 1] - sg[i];
    const double v0 = vs[i], dv = vs[i + 1] - vs[i];
    const double w0 = ws[i], dw = ws[i + 1] - ws[i];
    const double vmin = std::min(vs[i], vs[i + 1]), vmax = std::max(vs[i], vs[i + 1]);
    const double wmin = std::min(ws[i], ws[i + 1]), wmax = std::max(ws[i], ws[i + 1]);
    for (std::size_t j = 0; j + 1 < tg.size(); ++j) {
      const double umin = std::min(ut[j], ut[j + 1]), umax = std::max(ut[j], ut[j + 1]);
      if (umax < vmin - slack || umin > vmax + slack) continue;
      const double zmin = std::min(zt[j], zt[j + 1]), zmax = std::max(zt[j], zt[j + 1]);
      if (zmax < wmin - slack || zmin > wmax + slack) continue;

      const double dt = tg[j + 1] - tg[j];
      const double u0 = ut[j], du = ut[j + 1] - ut[j];
      const double z0 = zt[j], dz = zt[j + 1] - zt[j];
      // Local coordinates a in [0,1] along s, b in [0,1] along t:
      //   -dv*a + du*b = v0 - u0
      //    dw*a - dz*b = z0 - w0
      const double m11 = -dv, m12 = du, m21 = dw, m22 = -dz;
      const double e1 = v0 - u0, e2 = z0 - w0;
      const double det = m11 * m22 - m12 * m21;
      const double det_st = det / (ds * dt);
      PairSolution sol;
      double a = 0, b = 0;
      if (std::abs(det_st) >= tol.eq_tol) {
        a = (e1 * m22 - m12 * e2) / det;
        b = (m11 * e2 - e1 * m21) / det;
        const double eps = 1e-12;
        if (a < -eps || a > 1 + eps || b < -eps || b > 1 + eps) continue;
        a = std::clamp(a, 0.0, 1.0);
        b = std::clamp(b, 0.0, 1.0);
      } else {
        // Parallel or vanishing rows: the solution set is empty, a line, or the whole cell.
        const double scale = tol.eq_tol * std::max(ds, dt);
        const double n1 = std::hypot(m11, m12), n2 = std::hypot(m21, m22);
        bool found = false;
        if (n1 <= scale && n2 <= scale) {
          if (std::abs(e1) <= tol.eq_tol && std::abs(e2) <= tol.eq_tol) {
            a = b = 0.5;
            found = true;
          }
        } else if (n1 <= scale) {
          if (std::abs(e1) <= tol.eq_tol) found = detail::clip_line_to_unit_square(m21, m22, e2, a, b);
        } else if (n2 <= scale) {
          if (std::abs(e2) <= tol.eq_tol) found = detail::clip_line_to_unit_square(m11, m12, e1, a, b);
        } else {
          const double k = (m11 * m21 + m12 * m22) >= 0 ? 1.0 : -1.0;
          if (std::abs(e1 / n1 - k * e2 / n2) <= tol.eq_tol)
            found = detail::clip_line_to_unit_square(m11, m12, e1, a, b);
        }
        if (!found) continue;
        sol.singular = true;
      }
      sol.s = sg[i] + a * ds;
      sol.t = tg[j] + b * dt;
      sol.residual_f = std::abs(u(sol.t) - v(sol.s));
      sol.residual_g = std::abs(w(sol.s) - z(sol.t));
      sol.at_breakpoint = detail::near_grid_node(sg, sol.s, tol.endpoint_tol) ||
                          detail::near_grid_node(tg, sol.t, tol.endpoint_tol);
      raw.push_back(sol);
    }
  }

  std::sort(raw.begin(), raw.end(), [](const PairSolution& p, const PairSolution& q) {
    return p.s != q.s ? p.s < q.s : p.t < q.t;
  });
  // Solutions on shared cell boundaries are found by each adjacent cell.
  std::vector<PairSolution> out;
  const double merge = 1e-9;
  for (const PairSolution& p : raw) {
    bool dup = false;
    for (auto it = out.rbegin(); it != out.rend() && p.s - it->s <= merge; ++it) {
      if (std::abs(p.t - it->t) <= merge) {
        it->singular = it->singular || p.singular;
        it->at_breakpoint = it->at_breakpoint || p.at_breakpoint;
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(p);
  }
  return out;
}

/// A root of f(t) - g(t).
struct PLRoot {
  double t = 0;
  bool singular = false;  // f - g vanishes on a whole cell
  bool at_breakpoint = false;
};

/// All roots of f - g on the common domain, cell by cell.
inline std::vector<PLRoot> solve_pl_equal(const PLFunction& f, const PLFunction& g,
                                          const Tolerance& tol = {}) {
  const std::vector<double> grid = detail::merge_grid(f, g);
  std::vector<PLRoot> out;
  if (grid.size() < 2) return out;
  std::vector<double> h(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) h[i] = f(grid[i]) - g(grid[i]);
  auto push = [&](PLRoot r) {
    if (!out.empty() && std::abs(out.back().t - r.t) <= 1e-9) {
      out.back().singular = out.back().singular || r.singular;
      out.back().at_breakpoint = out.back().at_breakpoint || r.at_breakpoint;
      return;
    }
    out.push_back(r);
  };
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = h[i], b = h[i + 1];
    const bool za = std::abs(a) <= tol.eq_tol, zb = std::abs(b) <= tol.eq_tol;
    if (za && zb) {
      push({0.5 * (grid[i] + grid[i + 1]), true, false});
      continue;
    }
    if (!(za || zb || (a < 0) != (b < 0))) continue;
    double t = za ? grid[i] : zb ? grid[i + 1] : grid[i] + (grid[i + 1] - grid[i]) * a / (a - b);
    push({t, false, detail::near_grid_node(grid, t, tol.endpoint_tol)});
  }
  return out;
}

/// A point where a curve meets the vertical line x1 = x.
struct VerticalCrossing {
  std::size_t curve = 0;
  double t = 0;
  double x2 = 0;
  bool near_vertex = false;      // within endpoint_tol of a curve vertex
  bool vertical_segment = false;  // the segment itself lies on the line
};

/// Every crossing of one curve with the vertical line x1 = x.
inline std::vector<VerticalCrossing> vertical_crossings(const PLCurve& c, std::size_t curve_index,
                                                        double x, const Tolerance& tol = {}) {
  std::vector<VerticalCrossing> out;
  const std::size_t n = c.segment_count();
  const double step = n ? 1.0 / static_cast<double>(n) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = c.segment_start(i), b = c.segment_end(i);
    const double fa = a.x1 - x, fb = b.x1 - x;
    if (std::abs(b.x1 - a.x1) <= tol.eq_tol) {
      if (std::abs(fa) <= tol.eq_tol)
        out.push_back({curve_index, (i + 0.5) * step, 0.5 * (a.x2 + b.x2), true, true});
      continue;
    }
    if ((fa > 0 && fb > 0) || (fa < 0 && fb < 0)) continue;
    const double lam = std::clamp(fa / (fa - fb), 0.0, 1.0);
    VerticalCrossing vc{curve_index, (i + lam) * step, a.x2 + lam * (b.x2 - a.x2), false, false};
    vc.near_vertex = lam * step <= tol.endpoint_tol || (1 - lam) * step <= tol.endpoint_tol;
    if (vc.t >= 1.0) vc.t = c.closed ? 0.0 : 1.0;
    out.push_back(vc);
  }
  // A crossing exactly at a vertex is reported by both incident segments.
  std::sort(out.begin(), out.end(), [](const auto& p, const auto& q) { return p.t < q.t; });
  std::vector<VerticalCrossing> dedup;
  for (const auto& vc : out) {
    if (!dedup.empty() && std::abs(dedup.back().t - vc.t) <= 1e-12) {
      dedup.back().near_vertex = true;
      continue;
    }
    dedup.push_back(vc);
  }
  if (c.closed && dedup.size() >= 2 && dedup.front().t <= 1e-12 && 1.0 - dedup.back().t <= 1e-12) {
    dedup.front().near_vertex = true;
    dedup.pop_back();
  }
  return dedup;
}

/// Crossings of the listed curves with x1 = x strictly inside
/// (y_low + sep_tol, y_high - sep_tol).
inline std::vector<VerticalCrossing> vertical_hits(std::span<const PLCurve> curves, double x,
                                                   double y_low, double y_high,
                                                   const Tolerance& tol = {}) {
  if (!(y_low < y_high)) throw DomainError("vertical_hits requires y_low < y_high");
  std::vector<VerticalCrossing> out;
  for (std::size_t ci = 0; ci < curves.size(); ++ci)
    for (const auto& vc : vertical_crossings(curves[ci], ci, x, tol))
      if (vc.x2 > y_low + tol.sep_tol && vc.x2 < y_high - tol.sep_tol) out.push_back(vc);
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic noise. Offsets are derived from SplitMix64 applied to a key
// folded from (seed, FNV-1a-64(string id), index); both functions are fixed so
// perturbations reproduce bit-for-bit across runs and platforms.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::uint64_t noise_key(std::uint64_t seed, std::string_view id, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ fnv1a64(id)) ^ index);
}

/// Uniform double in [0,1) from the top 53 bits.
inline double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// A point uniformly distributed in the closed unit disk, derived from key.
inline Point2 disk_offset(std::uint64_t key) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double r = std::sqrt(unit_double(splitmix64(key)));
  const double a = kTwoPi * unit_double(splitmix64(key ^ 0xA5A5A5A5A5A5A5A5ull));
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace knotmu
