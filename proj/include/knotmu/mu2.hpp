#pragma once

// Cycles of overcrossings on a decker diagram and the mod-2 invariant.
//
// A 4-cycle is (p1, p2, p3, p4) with p1, p4 on over edges, p3 = tau(p1),
// p2 = tau(p4), p2 directly above p1 and p3 directly above p4. A 2-cycle is an
// over point p4 with p2 = tau(p4) directly above it and an under point p3 on the
// open vertical segment between them; p1 = tau(p3).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "knotmu/diagram.hpp"
#include "knotmu/error.hpp"
#include "knotmu/geom.hpp"

namespace knotmu {

struct CyclePoint {
  std::string edge;
  std::string curve;
  double t = 0;    // curve parameter
  double phi = 0;  // fraction along the edge
  Point2 at;
};

struct FourCycle {
  std::array<CyclePoint, 4> p;
  double residual_f = 0;  // |x1(p2) - x1(p1)|
  double residual_g = 0;  // |x1(p3) - x1(p4)|
  std::string orbit_id;
};

struct TwoCycle {
  std::array<CyclePoint, 4> p;
  double residual = 0;  // |x1(p2) - x1(p4)|
};

enum class DegeneracyPattern {
  cd1vt_a,
  cd1vt_b,
  cd1vt_c,
  cd1vt_d,
  cd1vt_e,
  cd1vt_f,
  vertical_segment,
  cell_boundary,
  near_coincidence,
  singular_cell,
};

inline const char* to_string(DegeneracyPattern p) {
  switch (p) {
    case DegeneracyPattern::cd1vt_a: return "cd1vt-a";
    case DegeneracyPattern::cd1vt_b: return "cd1vt-b";
    case DegeneracyPattern::cd1vt_c: return "cd1vt-c";
    case DegeneracyPattern::cd1vt_d: return "cd1vt-d";
    case DegeneracyPattern::cd1vt_e: return "cd1vt-e";
    case DegeneracyPattern::cd1vt_f: return "cd1vt-f";
    case DegeneracyPattern::vertical_segment: return "vertical-segment";
    case DegeneracyPattern::cell_boundary: return "cell-boundary";
    case DegeneracyPattern::near_coincidence: return "near-coincidence";
    default: return "singular-cell";
  }
}

/// What tripped a near-solution; input to classify_degeneracy.
enum class Trigger { singular, boundary, coincidence, vertical_segment };

struct NearSolution {
  Trigger trigger = Trigger::singular;
  std::vector<CyclePoint> points;
  std::string source;  // "four-cycle", "two-cycle" or "pre-check"
};

struct DegeneracyEvent {
  DegeneracyPattern pattern = DegeneracyPattern::singular_cell;
  std::string source;
  std::string evidence;
  std::vector<CyclePoint> location;
  double tolerance = 0;
};

struct RetryRecord {
  std::uint64_t seed = 0;
  double magnitude = 0;
  std::size_t events = 0;
};

struct VoteRecord {
  int trials = 0;
  int ones = 0;
  int zeros = 0;
  int failed = 0;
  bool unanimous() const { return failed == 0 && (ones == 0 || zeros == 0); }
};

struct MuResult {
  int mu = 0;
  int n4 = 0;
  int n2 = 0;
  std::size_t raw_four = 0;  // ordered 4-cycle solutions before R-quotient
  std::vector<FourCycle> four_cycles;
  std::vector<TwoCycle> two_cycles;
  std::vector<DegeneracyEvent> degeneracies;  // events of the runs that were discarded
  std::vector<RetryRecord> retries;
  std::optional<VoteRecord> vote;
};

/// Degeneracies persisted through every perturbation retry.
class UnresolvedDegeneracy : public DegenerateConfiguration {
 public:
  UnresolvedDegeneracy(const std::string& what, std::vector<DegeneracyEvent> events,
                       std::vector<RetryRecord> retries)
      : DegenerateConfiguration(what), events(std::move(events)), retries(std::move(retries)) {}
  std::vector<DegeneracyEvent> events;
  std::vector<RetryRecord> retries;
};

// ---------------------------------------------------------------------------

namespace detail {

inline double sigma(Orientation o, double phi) { return partner_fraction(o, phi); }

// x1 along an edge, as a function of the edge fraction.
inline PLFunction x1_track(const DiagramIndex& ix, std::size_t e) {
  std::vector<PLFunction::Breakpoint> bps;
  for (double phi : edge_vertex_fractions(*ix.edge(e).edge, ix.curve_of(e)))
    bps.push_back({phi, ix.point(e, phi).x1});
  return PLFunction(std::move(bps));
}

// x1 of tau(E(phi)) as a function of phi on the over edge E.
inline PLFunction partner_x1_track(const DiagramIndex& ix, std::size_t e) {
  const std::size_t f = ix.edge(e).partner;
  const Orientation o = ix.edge(e).orientation;
  std::vector<PLFunction::Breakpoint> bps;
  for (double psi : edge_vertex_fractions(*ix.edge(f).edge, ix.curve_of(f)))
    bps.push_back({sigma(o, psi), ix.point(f, psi).x1});
  std::sort(bps.begin(), bps.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  return PLFunction(std::move(bps));
}

inline CyclePoint make_point(const DiagramIndex& ix, std::size_t e, double phi) {
  const Edge& ed = *ix.edge(e).edge;
  return {ed.id, ed.curve, ix.param(e, phi), phi, ix.point(e, phi)};
}

inline bool near_edge_end(double phi, const Tolerance& tol) {
  return phi <= tol.endpoint_tol || phi >= 1.0 - tol.endpoint_tol;
}

inline std::string fixed9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9f", x);
  return buf;
}

inline double wrapped_gap(double a, double b) {
  double d = std::abs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

}  // namespace detail

/// Matches a flagged near-solution against the codimension-one patterns.
///
/// Triple-vertex involvement (a point at a triple-point preimage) selects the
/// cd1vt-a..e family by the number of points sharing one vertical line:
/// at most two gives a, three gives b when the odd point is highest and c
/// otherwise, four or more gives d when the highest point is on an over edge
/// and e otherwise. Four aligned points with no triple vertex give f. Anything
/// else falls back to the trigger's plumbing category.
inline DegeneracyEvent classify_degeneracy(const DeckerDiagram& d, const NearSolution& ns,
                                           const Tolerance& tol = {}) {
  DegeneracyEvent ev;
  ev.source = ns.source;
  ev.location = ns.points;

  // Distinct planar points.
  std::vector<CyclePoint> pts;
  for (const auto& p : ns.points) {
    bool dup = false;
    for (const auto& q : pts) dup = dup || distance(p.at, q.at) <= tol.sep_tol;
    if (!dup) pts.push_back(p);
  }

  std::string triple;
  for (const auto& tv : d.triple_vertices)
    for (const auto& inc : tv.incident)
      for (const auto& p : pts) {
        if (inc.curve != p.curve || !triple.empty()) continue;
        const NamedCurve* c = d.find_curve(inc.curve);
        const bool near_param = detail::wrapped_gap(inc.t, p.t) <= tol.endpoint_tol;
        const bool near_pos = c && distance(eval_curve_wrapped(c->curve, inc.t), p.at) <= 10 * tol.sep_tol;
        if (near_param || near_pos) triple = tv.id;
      }

  // Largest group of points sharing one vertical line.
  std::vector<CyclePoint> aligned;
  for (const auto& p : pts) {
    std::vector<CyclePoint> group;
    for (const auto& q : pts)
      if (std::abs(q.at.x1 - p.at.x1) <= tol.sep_tol) group.push_back(q);
    if (group.size() > aligned.size()) aligned = group;
  }
  std::sort(aligned.begin(), aligned.end(), [](const auto& a, const auto& b) { return a.at.x2 < b.at.x2; });
  const std::size_t k = aligned.size();

  auto is_over = [&d](const CyclePoint& p) {
    const Edge* e = d.find_edge(p.edge);
    return e && e->label == Label::over;
  };

  if (!triple.empty()) {
    ev.tolerance = tol.endpoint_tol;
    if (k <= 2) {
      ev.pattern = DegeneracyPattern::cd1vt_a;
    } else if (k == 3) {
      // The point not shared with the cycle's pair structure: take the one
      // farthest from the middle.
      const double mid = aligned[1].at.x2;
      const bool top_odd = aligned[2].at.x2 - mid >= mid - aligned[0].at.x2;
      ev.pattern = top_odd ? DegeneracyPattern::cd1vt_b : DegeneracyPattern::cd1vt_c;
    } else {
      ev.pattern = is_over(aligned.back()) ? DegeneracyPattern::cd1vt_d : DegeneracyPattern::cd1vt_e;
    }
    ev.evidence = "triple vertex '" + triple + "' with " + std::to_string(k) + " vertically aligned points";
    return ev;
  }
  if (k >= 4) {
    ev.pattern = DegeneracyPattern::cd1vt_f;
    ev.tolerance = tol.sep_tol;
    ev.evidence = std::to_string(k) + " points on one vertical line";
    return ev;
  }
  switch (ns.trigger) {
    case Trigger::singular:
      ev.pattern = DegeneracyPattern::singular_cell;
      ev.tolerance = tol.eq_tol;
      ev.evidence = "cell determinant below eq_tol";
      break;
    case Trigger::boundary:
      ev.pattern = DegeneracyPattern::cell_boundary;
      ev.tolerance = tol.endpoint_tol;
      ev.evidence = "solution within endpoint_tol of an edge end or curve vertex";
      break;
    case Trigger::coincidence:
      ev.pattern = DegeneracyPattern::near_coincidence;
      ev.tolerance = tol.sep_tol;
      ev.evidence = "points or vertical gap within sep_tol";
      break;
    case Trigger::vertical_segment:
      ev.pattern = DegeneracyPattern::vertical_segment;
      ev.tolerance = tol.eq_tol;
      ev.evidence = "curve segment parallel to the x2 axis";
      break;
  }
  return ev;
}

/// Curve segments lying along a vertical line; these produce solution continua.
inline std::vector<DegeneracyEvent> vertical_segment_events(const DeckerDiagram& d, const Tolerance& tol = {}) {
  std::vector<DegeneracyEvent> out;
  for (const auto& nc : d.curves) {
    const PLCurve& c = nc.curve;
    for (std::size_t i = 0; i < c.segment_count(); ++i) {
      const Point2 a = c.segment_start(i), b = c.segment_end(i);
      if (std::abs(a.x1 - b.x1) > tol.eq_tol) continue;
      NearSolution ns{Trigger::vertical_segment, {}, "pre-check"};
      const double t = (i + 0.5) / static_cast<double>(c.segment_count());
      ns.points.push_back({"", nc.id, t, 0, lerp(a, b, 0.5)});
      out.push_back(classify_degeneracy(d, ns, tol));
    }
  }
  return out;
}

struct FourCycleSearch {
  std::vector<FourCycle> cycles;  // one per R-orbit
  std::size_t raw = 0;            // ordered solutions passing the gates
  std::vector<DegeneracyEvent> events;
};

inline FourCycleSearch search_four_cycles(const DeckerDiagram& d, const Tolerance& tol = {}) {
  FourCycleSearch out;
  if (d.edges.empty()) return out;
  const DiagramIndex ix(d);
  std::vector<std::size_t> over;
  for (std::size_t e = 0; e < ix.edge_count(); ++e)
    if (ix.edge(e).over()) over.push_back(e);
  std::vector<PLFunction> own(ix.edge_count()), img(ix.edge_count());
  for (std::size_t e : over) {
    own[e] = detail::x1_track(ix, e);
    img[e] = detail::partner_x1_track(ix, e);
  }

  for (std::size_t e1 : over)
    for (std::size_t e2 : over) {
      // s on e1 (p1 = E1(s), p3 = tau p1), t on e2 (p4 = E2(t), p2 = tau p4).
      const auto sols = solve_separable_pair(img[e2], own[e1], img[e1], own[e2], tol);
      const std::size_t f1 = ix.edge(e1).partner, f2 = ix.edge(e2).partner;
      for (const PairSolution& sol : sols) {
        const CyclePoint p1 = detail::make_point(ix, e1, sol.s);
        const CyclePoint p3 = detail::make_point(ix, f1, detail::sigma(ix.edge(e1).orientation, sol.s));
        const CyclePoint p4 = detail::make_point(ix, e2, sol.t);
        const CyclePoint p2 = detail::make_point(ix, f2, detail::sigma(ix.edge(e2).orientation, sol.t));
        // The diagonal s = t on one edge is the 2-cycle alignment p1 = p4.
        if (e1 == e2 && distance(p1.at, p4.at) <= tol.sep_tol) continue;

        NearSolution ns{Trigger::singular, {p1, p2, p3, p4}, "four-cycle"};
        if (sol.singular) {
          out.events.push_back(classify_degeneracy(d, ns, tol));
          continue;
        }
        const double g1 = p2.at.x2 - p1.at.x2, g2 = p3.at.x2 - p4.at.x2;
        if (g1 < -tol.sep_tol || g2 < -tol.sep_tol) continue;
        if (detail::near_edge_end(sol.s, tol) || detail::near_edge_end(sol.t, tol)) {
          ns.trigger = Trigger::boundary;
          out.events.push_back(classify_degeneracy(d, ns, tol));
          continue;
        }
        bool close = g1 <= tol.sep_tol || g2 <= tol.sep_tol;
        const std::array<Point2, 4> q{p1.at, p2.at, p3.at, p4.at};
        for (int a = 0; a < 4; ++a)
          for (int b = a + 1; b < 4; ++b) close = close || distance(q[a], q[b]) < tol.sep_tol;
        if (close) {
          ns.trigger = Trigger::coincidence;
          out.events.push_back(classify_degeneracy(d, ns, tol));
          continue;
        }
        ++out.raw;
        // Canonical representative of the R-orbit {(E1,s,E2,t), (E2,t,E1,s)}.
        const Edge& a = *ix.edge(e1).edge;
        const Edge& b = *ix.edge(e2).edge;
        const bool canonical = a.id != b.id ? a.id < b.id : sol.s < sol.t;
        if (!canonical) continue;
        FourCycle fc{{p1, p2, p3, p4}, sol.residual_f, sol.residual_g, {}};
        fc.orbit_id = a.id + "@" + detail::fixed9(sol.s) + "|" + b.id + "@" + detail::fixed9(sol.t);
        out.cycles.push_back(std::move(fc));
      }
    }
  std::sort(out.cycles.begin(), out.cycles.end(),
            [](const FourCycle& x, const FourCycle& y) { return x.orbit_id < y.orbit_id; });
  return out;
}

/// One representative per R-orbit of 4-cycles. Degenerate near-solutions are
/// appended to *events when given and otherwise dropped.
inline std::vector<FourCycle> find_four_cycles(const DeckerDiagram& d, const Tolerance& tol = {},
                                               std::vector<DegeneracyEvent>* events = nullptr) {
  FourCycleSearch s = search_four_cycles(d, tol);
  if (events) events->insert(events->end(), s.events.begin(), s.events.end());
  return std::move(s.cycles);
}

inline std::vector<TwoCycle> find_two_cycles(const DeckerDiagram& d, const Tolerance& tol = {},
                                             std::vector<DegeneracyEvent>* events = nullptr) {
  std::vector<TwoCycle> out;
  if (d.edges.empty()) return out;
  const DiagramIndex ix(d);
  auto flag = [&](Trigger trig, std::vector<CyclePoint> pts) {
    if (events) events->push_back(classify_degeneracy(d, NearSolution{trig, std::move(pts), "two-cycle"}, tol));
  };

  for (std::size_t e = 0; e < ix.edge_count(); ++e) {
    if (!ix.edge(e).over()) continue;
    const std::size_t f = ix.edge(e).partner;
    const Orientation o = ix.edge(e).orientation;
    const auto roots = solve_pl_equal(detail::x1_track(ix, e), detail::partner_x1_track(ix, e), tol);
    for (const PLRoot& r : roots) {
      const CyclePoint p4 = detail::make_point(ix, e, r.t);
      const CyclePoint p2 = detail::make_point(ix, f, detail::sigma(o, r.t));
      const double gap = p2.at.x2 - p4.at.x2;
      if (!r.singular && gap < -tol.sep_tol) continue;
      // Fixed point of a self-paired curve: tau(p4) = p4.
      if (distance(p2.at, p4.at) <= tol.sep_tol) continue;
      if (r.singular) {
        flag(Trigger::singular, {p2, p4});
        continue;
      }
      if (detail::near_edge_end(r.t, tol)) {
        flag(Trigger::boundary, {p2, p4});
        continue;
      }
      if (gap <= tol.sep_tol) {
        flag(Trigger::coincidence, {p2, p4});
        continue;
      }
      const double x = p4.at.x1;
      for (std::size_t c = 0; c < d.curves.size(); ++c) {
        for (const VerticalCrossing& vc : vertical_crossings(d.curves[c].curve, c, x, tol)) {
          if (vc.x2 < p4.at.x2 - tol.sep_tol || vc.x2 > p2.at.x2 + tol.sep_tol) continue;
          const bool at_end = vc.x2 <= p4.at.x2 + tol.sep_tol || vc.x2 >= p2.at.x2 - tol.sep_tol;
          auto loc = ix.locate(c, vc.t);
          if (!loc) continue;
          const auto [he, hphi] = *loc;
          if (ix.edge(he).over()) continue;
          if (at_end) {
            // p2 itself is found here; any other under point this close is degenerate.
            const bool is_p2 = d.curves[c].id == p2.curve && detail::wrapped_gap(vc.t, p2.t) <= 1e-9;
            if (!is_p2) flag(Trigger::coincidence, {p2, p4, detail::make_point(ix, he, hphi)});
            continue;
          }
          const CyclePoint p3 = detail::make_point(ix, he, hphi);
          if (vc.vertical_segment) {
            flag(Trigger::vertical_segment, {p2, p3, p4});
            continue;
          }
          if (vc.near_vertex || detail::near_edge_end(hphi, tol)) {
            flag(Trigger::boundary, {p2, p3, p4});
            continue;
          }
          const std::size_t g = ix.edge(he).partner;
          const CyclePoint p1 = detail::make_point(ix, g, detail::sigma(ix.edge(he).orientation, hphi));
          if (distance(p1.at, p2.at) < tol.sep_tol || distance(p1.at, p3.at) < tol.sep_tol ||
              distance(p1.at, p4.at) < tol.sep_tol) {
            flag(Trigger::coincidence, {p1, p2, p3, p4});
            continue;
          }
          out.push_back({{p1, p2, p3, p4}, std::abs(p2.at.x1 - p4.at.x1)});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const TwoCycle& a, const TwoCycle& b) {
    if (a.p[3].edge != b.p[3].edge) return a.p[3].edge < b.p[3].edge;
    if (a.p[3].phi != b.p[3].phi) return a.p[3].phi < b.p[3].phi;
    return a.p[2].at.x2 < b.p[2].at.x2;
  });
  return out;
}

struct MuOptions {
  int max_retries = 8;
  std::uint64_t seed_base = 0;  // retry k uses seed seed_base + k
};

namespace detail {

struct CleanRun {
  MuResult result;
  std::vector<DegeneracyEvent> events;
};

inline CleanRun run_once(const DeckerDiagram& d, const Tolerance& tol) {
  CleanRun r;
  r.events = vertical_segment_events(d, tol);
  if (!r.events.empty()) return r;
  FourCycleSearch fs = search_four_cycles(d, tol);
  r.events = std::move(fs.events);
  r.result.two_cycles = find_two_cycles(d, tol, &r.events);
  r.result.four_cycles = std::move(fs.cycles);
  r.result.raw_four = fs.raw;
  r.result.n4 = static_cast<int>(r.result.four_cycles.size());
  r.result.n2 = static_cast<int>(r.result.two_cycles.size());
  r.result.mu = (r.result.n4 + r.result.n2) % 2;
  return r;
}

}  // namespace detail

/// mu = (n4 + n2) mod 2. Degenerate runs are retried on perturbed copies
/// (seeds 1..max_retries, magnitude 10 * endpoint_tol doubling per retry).
inline MuResult mu2(const DeckerDiagram& d, const Tolerance& tol = {}, const MuOptions& opt = {}) {
  tol.check();
  detail::CleanRun run = detail::run_once(d, tol);
  std::vector<DegeneracyEvent> log;
  std::vector<RetryRecord> retries;
  for (int k = 1; !run.events.empty(); ++k) {
    log.insert(log.end(), run.events.begin(), run.events.end());
    if (k > opt.max_retries)
      throw UnresolvedDegeneracy("degeneracies persist after " + std::to_string(opt.max_retries) +
                                     " perturbation retries",
                                 std::move(log), std::move(retries));
    const std::uint64_t seed = opt.seed_base + static_cast<std::uint64_t>(k);
    const double magnitude = 10.0 * tol.endpoint_tol * std::ldexp(1.0, k - 1);
    run = detail::run_once(perturb_diagram(d, seed, magnitude, tol), tol);
    retries.push_back({seed, magnitude, run.events.size()});
  }
  run.result.degeneracies = std::move(log);
  run.result.retries = std::move(retries);
  return run.result;
}

/// Majority parity over `trials` perturbed copies (seeds 1..trials, magnitude 1e-3).
inline MuResult stable_mu2(const DeckerDiagram& d, int trials, const Tolerance& tol = {},
                           const MuOptions& opt = {}, double magnitude = 1e-3) {
  if (trials < 1 || trials % 2 == 0) throw DomainError("trials must be odd and positive");
  VoteRecord vote;
  vote.trials = trials;
  std::optional<MuResult> first[2];
  std::optional<UnresolvedDegeneracy> last_error;
  for (int i = 1; i <= trials; ++i) {
    try {
      MuResult r = mu2(perturb_diagram(d, opt.seed_base + static_cast<std::uint64_t>(i), magnitude, tol), tol, opt);
      (r.mu ? vote.ones : vote.zeros)++;
      if (!first[r.mu]) first[r.mu] = std::move(r);
    } catch (const UnresolvedDegeneracy& e) {
      ++vote.failed;
      last_error = e;
    }
  }
  if (vote.ones + vote.zeros == 0) throw *last_error;
  MuResult out = *first[vote.ones > vote.zeros ? 1 : 0];
  out.vote = vote;
  return out;
}

}  // namespace knotmu
