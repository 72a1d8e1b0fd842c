#pragma once

// Brute-force recount of cycle solutions. Slow on purpose: it uses only curve
// evaluation, tau and dense sampling, and never the per-cell linear solve.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "knotmu/diagram.hpp"
#include "knotmu/error.hpp"
#include "knotmu/geom.hpp"

namespace knotmu {

struct GridConfig {
  int resolution = 1024;  // cells per axis at the scan level, a power of two >= 256
  int refinement_depth = 8;

  void check() const {
    if (resolution < 256 || (resolution & (resolution - 1)) != 0)
      throw DomainError("grid resolution must be a power of two >= 256");
    if (refinement_depth < 0) throw DomainError("refinement_depth must be >= 0");
  }
  int depth() const { return static_cast<int>(std::lround(std::log2(resolution))) + refinement_depth; }
};

struct SolutionBox {
  double s0, s1, t0, t1;
  double s() const { return 0.5 * (s0 + s1); }
  double t() const { return 0.5 * (t0 + t1); }
};

/// Univariate track given as a plain function with a Lipschitz bound.
struct FnTrack {
  std::function<double(double)> f;
  double lipschitz = 0;
  double operator()(double x) const { return f(x); }
};

namespace detail {

// The scan grid overhangs [0,1]; tracks are extended by their end values.
inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

inline std::pair<double, double> bounds(const PLFunction& f, double a, double b) {
  a = clamp01(a);
  b = clamp01(b);
  if (a >= b) return {f(a), f(a)};
  return f.range(a, b);
}

inline std::pair<double, double> bounds(const FnTrack& f, double a, double b) {
  a = clamp01(a);
  b = clamp01(b);
  const double m = f(0.5 * (a + b)), r = 0.5 * (b - a) * f.lipschitz;
  return {m - r, m + r};
}

// Winding number of (F, G) around the box boundary, sampled.
template <class Track>
int box_winding(const Track& u, const Track& v, const Track& w, const Track& z, const SolutionBox& b,
                int per_side = 16) {
  std::vector<std::pair<double, double>> loop;
  auto at = [&](double s, double t) {
    s = clamp01(s);
    t = clamp01(t);
    loop.emplace_back(u(t) - v(s), w(s) - z(t));
  };
  for (int i = 0; i < per_side; ++i) at(b.s0 + (b.s1 - b.s0) * i / per_side, b.t0);
  for (int i = 0; i < per_side; ++i) at(b.s1, b.t0 + (b.t1 - b.t0) * i / per_side);
  for (int i = 0; i < per_side; ++i) at(b.s1 - (b.s1 - b.s0) * i / per_side, b.t1);
  for (int i = 0; i < per_side; ++i) at(b.s0, b.t1 - (b.t1 - b.t0) * i / per_side);
  double total = 0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const auto [x0, y0] = loop[i];
    const auto [x1, y1] = loop[(i + 1) % loop.size()];
    if ((x0 == 0 && y0 == 0) || (x1 == 0 && y1 == 0)) return 0;
    total += std::atan2(x0 * y1 - y0 * x1, x0 * x1 + y0 * y1);
  }
  return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

template <class Track>
void quadtree(const Track& u, const Track& v, const Track& w, const Track& z, const SolutionBox& b, int depth,
              int max_depth, std::vector<SolutionBox>& out) {
  const auto [umin, umax] = bounds(u, b.t0, b.t1);
  const auto [vmin, vmax] = bounds(v, b.s0, b.s1);
  if (umax < vmin || umin > vmax) return;
  const auto [wmin, wmax] = bounds(w, b.s0, b.s1);
  const auto [zmin, zmax] = bounds(z, b.t0, b.t1);
  if (wmax < zmin || wmin > zmax) return;
  if (depth == max_depth) {
    if (box_winding(u, v, w, z, b) != 0) out.push_back(b);
    return;
  }
  const double sm = 0.5 * (b.s0 + b.s1), tm = 0.5 * (b.t0 + b.t1);
  quadtree(u, v, w, z, {b.s0, sm, b.t0, tm}, depth + 1, max_depth, out);
  quadtree(u, v, w, z, {sm, b.s1, b.t0, tm}, depth + 1, max_depth, out);
  quadtree(u, v, w, z, {b.s0, sm, tm, b.t1}, depth + 1, max_depth, out);
  quadtree(u, v, w, z, {sm, b.s1, tm, b.t1}, depth + 1, max_depth, out);
}

}  // namespace detail

/// Leaf boxes (side about 2^-depth) enclosing a solution of u(t) = v(s),
/// w(s) = z(t), confirmed by a nonzero winding number of (F, G). The grid is
/// shifted off the dyadic lattice so roots at dyadic parameters fall inside a
/// leaf rather than on its boundary.
template <class Track>
std::vector<SolutionBox> brute_pair_solutions(const Track& u, const Track& v, const Track& w, const Track& z,
                                              const GridConfig& cfg = {}) {
  cfg.check();
  std::vector<SolutionBox> out;
  const double h = std::ldexp(1.0, -cfg.depth());
  detail::quadtree(u, v, w, z, {-0.3090 * h, 1 + 0.4721 * h, -0.2361 * h, 1 + 0.3820 * h}, 0, cfg.depth(), out);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.s0 != b.s0 ? a.s0 < b.s0 : a.t0 < b.t0; });
  return out;
}

struct OracleCount {
  int count = 0;       // R-orbits (4-cycles) or cycles (2-cycles)
  int raw = 0;         // ordered 4-cycle solutions
  bool inconclusive = false;
  std::vector<std::string> notes;
};

namespace detail {

struct OracleEdge {
  const Edge* edge;
  const PLCurve* curve;
  const Edge* partner;
  const PLCurve* partner_curve;
};

inline double curve_speed(const PLCurve& c) {
  double m = 0;
  for (std::size_t i = 0; i < c.segment_count(); ++i)
    m = std::max(m, std::abs(c.segment_end(i).x1 - c.segment_start(i).x1));
  return m * static_cast<double>(c.segment_count());
}

inline Point2 oracle_point(const Edge& e, const PLCurve& c, double phi) {
  return eval_curve_wrapped(c, e.t0 + phi * edge_length(e));
}

// tau computed through the public correspondence.
inline Point2 oracle_tau_point(const DeckerDiagram& d, const Edge& e, const PLCurve& c, double phi) {
  double t = e.t0 + phi * edge_length(e);
  if (c.closed) t = wrap01(t);
  const EdgePoint q = tau(d, EdgePoint{e.id, std::min(t, 1.0)});
  const Edge* f = d.find_edge(q.edge);
  return eval_curve_wrapped(d.find_curve(f->curve)->curve, q.t);
}

inline std::vector<OracleEdge> oracle_edges(const DeckerDiagram& d) {
  std::vector<OracleEdge> out;
  for (const auto& p : d.pairings) {
    const Edge* o = d.find_edge(p.over_edge);
    const Edge* u = d.find_edge(p.under_edge);
    if (!o || !u) throw StructuralError("pairing references unknown edge");
    out.push_back({o, &d.find_curve(o->curve)->curve, u, &d.find_curve(u->curve)->curve});
  }
  return out;
}

}  // namespace detail

/// Recounts R-orbits of 4-cycles with the quadtree scan over every ordered pair
/// of over edges. Solutions whose gates fall within the box uncertainty are
/// marked inconclusive.
inline OracleCount brute_four_cycles(const DeckerDiagram& d, const GridConfig& cfg = {}, const Tolerance& tol = {}) {
  OracleCount out;
  const auto es = detail::oracle_edges(d);
  std::vector<FnTrack> own, img;
  for (const auto& oe : es) {
    own.push_back({[oe](double phi) { return detail::oracle_point(*oe.edge, *oe.curve, phi).x1; },
                   detail::curve_speed(*oe.curve) * edge_length(*oe.edge)});
    img.push_back({[&d, oe](double phi) { return detail::oracle_tau_point(d, *oe.edge, *oe.curve, phi).x1; },
                   detail::curve_speed(*oe.partner_curve) * edge_length(*oe.partner)});
  }
  const double h = std::ldexp(1.0, -cfg.depth());
  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = 0; j < es.size(); ++j) {
      for (const SolutionBox& b : brute_pair_solutions(img[j], own[i], img[i], own[j], cfg)) {
        const double s = detail::clamp01(b.s()), t = detail::clamp01(b.t());
        const Point2 p1 = detail::oracle_point(*es[i].edge, *es[i].curve, s);
        const Point2 p3 = detail::oracle_tau_point(d, *es[i].edge, *es[i].curve, s);
        const Point2 p4 = detail::oracle_point(*es[j].edge, *es[j].curve, t);
        const Point2 p2 = detail::oracle_tau_point(d, *es[j].edge, *es[j].curve, t);
        const double slack = 4 * h * (own[i].lipschitz + own[j].lipschitz + img[i].lipschitz + img[j].lipschitz) + tol.sep_tol;
        if (i == j && distance(p1, p4) <= slack) continue;
        const double g1 = p2.x2 - p1.x2, g2 = p3.x2 - p4.x2;
        if (g1 < -slack || g2 < -slack) continue;
        const bool edge_end = b.s0 <= 0 || b.s1 >= 1 || b.t0 <= 0 || b.t1 >= 1;
        if (g1 <= slack || g2 <= slack || edge_end) {
          out.inconclusive = true;
          out.notes.push_back("box at " + es[i].edge->id + "/" + es[j].edge->id + " straddles a gate");
          continue;
        }
        ++out.raw;
        const bool canonical = i != j ? es[i].edge->id < es[j].edge->id : s < t;
        if (canonical) ++out.count;
      }
    }
  if (out.raw != 2 * out.count) {
    out.inconclusive = true;
    out.notes.push_back("ordered solutions do not pair under R");
  }
  return out;
}

/// Recounts 2-cycles: dense sign-change scan for the over/partner alignment,
/// then a dense scan of every under edge across the vertical segment.
inline OracleCount brute_two_cycles(const DeckerDiagram& d, const GridConfig& cfg = {}, const Tolerance& tol = {}) {
  cfg.check();
  OracleCount out;
  const auto es = detail::oracle_edges(d);
  const int samples = cfg.resolution * 16;
  constexpr int kHitSamples = 1 << 14;
  for (const auto& oe : es) {
    auto hfun = [&](double phi) {
      return detail::oracle_tau_point(d, *oe.edge, *oe.curve, phi).x1 - detail::oracle_point(*oe.edge, *oe.curve, phi).x1;
    };
    double prev = hfun(0.0);
    for (int k = 1; k <= samples; ++k) {
      const double a0 = static_cast<double>(k - 1) / samples, b0 = static_cast<double>(k) / samples;
      const double cur = hfun(b0);
      if ((prev < 0) == (cur < 0) && prev != 0) {
        prev = cur;
        continue;
      }
      double a = a0, b = b0, fa = prev;
      prev = cur;
      for (int it = 0; it < 60 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b), fm = hfun(m);
        if ((fm < 0) == (fa < 0) && fm != 0) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const double phi = 0.5 * (a + b);
      const Point2 p4 = detail::oracle_point(*oe.edge, *oe.curve, phi);
      const Point2 p2 = detail::oracle_tau_point(d, *oe.edge, *oe.curve, phi);
      if (p2.x2 < p4.x2 - tol.sep_tol) continue;
      if (p2.x2 <= p4.x2 + tol.sep_tol || phi <= tol.endpoint_tol || phi >= 1 - tol.endpoint_tol) {
        out.inconclusive = true;
        out.notes.push_back("2-cycle root on " + oe.edge->id + " at a gate");
        continue;
      }
      const double x = p4.x1;
      for (const auto& ue : es) {
        const Edge& u = *ue.partner;
        const PLCurve& uc = *ue.partner_curve;
        auto g = [&](double psi) { return detail::oracle_point(u, uc, psi).x1 - x; };
        double gp = g(0.0);
        for (int m = 1; m <= kHitSamples; ++m) {
          const double c0 = static_cast<double>(m - 1) / kHitSamples, c1 = static_cast<double>(m) / kHitSamples;
          const double gc = g(c1);
          if ((gp < 0) == (gc < 0)) {
            gp = gc;
            continue;
          }
          double lo = c0, hi = c1, flo = gp;
          gp = gc;
          for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi), fm = g(mid);
            if ((fm < 0) == (flo < 0)) {
              lo = mid;
              flo = fm;
            } else {
              hi = mid;
            }
          }
          const double psi = 0.5 * (lo + hi);
          const Point2 p3 = detail::oracle_point(u, uc, psi);
          if (p3.x2 <= p4.x2 - tol.sep_tol || p3.x2 >= p2.x2 + tol.sep_tol) continue;
          if (distance(p3, p2) <= 1e-9) continue;  // p2 itself
          if (p3.x2 <= p4.x2 + tol.sep_tol || p3.x2 >= p2.x2 - tol.sep_tol) {
            out.inconclusive = true;
            out.notes.push_back("2-cycle hit at a gate");
            continue;
          }
          ++out.count;
        }
      }
    }
  }
  return out;
}

}  // namespace knotmu
