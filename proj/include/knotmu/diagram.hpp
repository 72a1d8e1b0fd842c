#pragma once

// Double-point (decker) diagrams: curves in the unit disk, over/under edges,
// the pairing involution between edges, and triple-point vertices.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "knotmu/error.hpp"
#include "knotmu/geom.hpp"

namespace knotmu {

enum class Label { over, under };
enum class Orientation { preserving, reversing };
enum class Height { top, middle, bottom };

inline const char* to_string(Label l) { return l == Label::over ? "over" : "under"; }
inline const char* to_string(Orientation o) {
  return o == Orientation::preserving ? "preserving" : "reversing";
}
inline const char* to_string(Height h) {
  switch (h) {
    case Height::top: return "top";
    case Height::middle: return "middle";
    default: return "bottom";
  }
}

struct NamedCurve {
  std::string id;
  PLCurve curve;
};

/// A parameter subinterval [t0, t1] of one curve carrying a fixed label.
/// On closed curves t1 <= t0 wraps through 0; the full circle is (0, 1).
struct Edge {
  std::string id;
  std::string curve;
  double t0 = 0;
  double t1 = 1;
  Label label = Label::over;
};

struct Pairing {
  std::string over_edge;
  std::string under_edge;
  Orientation orientation = Orientation::preserving;
};

struct Incidence {
  std::string curve;
  double t = 0;
};

/// One triple point of the projection: its three sheet preimages in the disk
/// and the relative x4-height of each sheet.
struct TripleVertex {
  std::string id;
  std::array<Incidence, 3> incident;
  std::array<Height, 3> heights{Height::top, Height::middle, Height::bottom};
};

struct DeckerDiagram {
  std::string name;
  std::string note;
  std::vector<NamedCurve> curves;
  std::vector<Edge> edges;
  std::vector<Pairing> pairings;
  std::vector<TripleVertex> triple_vertices;

  const NamedCurve* find_curve(std::string_view id) const {
    for (const auto& c : curves)
      if (c.id == id) return &c;
    return nullptr;
  }
  const Edge* find_edge(std::string_view id) const {
    for (const auto& e : edges)
      if (e.id == id) return &e;
    return nullptr;
  }
  const Pairing* find_pairing(std::string_view edge_id) const {
    for (const auto& p : pairings)
      if (p.over_edge == edge_id || p.under_edge == edge_id) return &p;
    return nullptr;
  }
};

/// A point of an edge, addressed by the edge id and a curve parameter.
struct EdgePoint {
  std::string edge;
  double t = 0;
};

// ---------------------------------------------------------------------------
// Edge parameter arithmetic

inline double wrap01(double t) {
  t -= std::floor(t);
  return t >= 1.0 ? 0.0 : t;
}

/// Parameter length of an edge; a closed-curve edge with t1 <= t0 wraps.
inline double edge_length(const Edge& e) {
  double len = e.t1 - e.t0;
  if (len <= 0) len += 1.0;
  return len;
}

inline bool is_full_edge(const Edge& e, const PLCurve& c) {
  return c.closed && std::abs(edge_length(e) - 1.0) <= 1e-12;
}

/// Curve parameter at edge fraction phi in [0,1].
inline double edge_param(const Edge& e, const PLCurve& c, double phi) {
  const double t = e.t0 + phi * edge_length(e);
  return c.closed ? wrap01(t) : std::clamp(t, 0.0, 1.0);
}

/// Edge fraction of curve parameter t, or nullopt when t lies outside the edge.
inline std::optional<double> edge_fraction(const Edge& e, const PLCurve& c, double t,
                                           double slack = 1e-12) {
  const double len = edge_length(e);
  double d = t - e.t0;
  if (c.closed) {
    d -= std::floor(d);
    if (d > len + slack && 1.0 - d <= slack) d -= 1.0;  // just before t0
  }
  if (d < -slack || d > len + slack) return std::nullopt;
  return std::clamp(d / len, 0.0, 1.0);
}

/// Edge fractions of the curve vertices lying on the edge, plus 0 and 1, sorted.
inline std::vector<double> edge_vertex_fractions(const Edge& e, const PLCurve& c) {
  std::vector<double> out{0.0, 1.0};
  const std::size_t n = c.segment_count();
  const double len = edge_length(e);
  for (std::size_t k = 0; k < n; ++k) {
    double d = static_cast<double>(k) / static_cast<double>(n) - e.t0;
    if (c.closed) d -= std::floor(d);
    const double phi = d / len;
    if (phi > 1e-13 && phi < 1.0 - 1e-13) out.push_back(phi);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Point2 edge_point(const Edge& e, const PLCurve& c, double phi) {
  return eval_curve_wrapped(c, edge_param(e, c, phi));
}

/// Fraction on the partner edge matched to fraction phi by the affine correspondence.
inline double partner_fraction(Orientation o, double phi) {
  return o == Orientation::preserving ? phi : 1.0 - phi;
}

// ---------------------------------------------------------------------------
// Indexed view used by the engines.

struct IndexedEdge {
  const Edge* edge = nullptr;
  std::size_t curve = 0;
  std::size_t partner = 0;
  Orientation orientation = Orientation::preserving;
  bool full = false;
  bool over() const { return edge->label == Label::over; }
};

/// Integer-indexed view of a diagram. Requires every edge to be paired exactly once.
class DiagramIndex {
 public:
  explicit DiagramIndex(const DeckerDiagram& d) : d_(&d) {
    std::map<std::string, std::size_t> curve_ix, edge_ix;
    for (std::size_t i = 0; i < d.curves.size(); ++i) curve_ix[d.curves[i].id] = i;
    for (std::size_t i = 0; i < d.edges.size(); ++i) edge_ix[d.edges[i].id] = i;
    edges_.resize(d.edges.size());
    std::vector<int> seen(d.edges.size(), 0);
    for (std::size_t i = 0; i < d.edges.size(); ++i) {
      auto it = curve_ix.find(d.edges[i].curve);
      if (it == curve_ix.end())
        throw StructuralError("edge '" + d.edges[i].id + "' references unknown curve '" +
                              d.edges[i].curve + "'");
      edges_[i].edge = &d.edges[i];
      edges_[i].curve = it->second;
      edges_[i].full = is_full_edge(d.edges[i], d.curves[it->second].curve);
    }
    for (const auto& p : d.pairings) {
      auto o = edge_ix.find(p.over_edge), u = edge_ix.find(p.under_edge);
      if (o == edge_ix.end() || u == edge_ix.end())
        throw StructuralError("pairing references unknown edge '" +
                              (o == edge_ix.end() ? p.over_edge : p.under_edge) + "'");
      edges_[o->second].partner = u->second;
      edges_[u->second].partner = o->second;
      edges_[o->second].orientation = edges_[u->second].orientation = p.orientation;
      ++seen[o->second];
      ++seen[u->second];
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (seen[i] != 1)
        throw StructuralError("edge '" + d.edges[i].id + "' is " +
                              (seen[i] == 0 ? "unpaired" : "paired more than once"));
    by_curve_.resize(d.curves.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) by_curve_[edges_[i].curve].push_back(i);
  }

  const DeckerDiagram& diagram() const { return *d_; }
  std::size_t edge_count() const { return edges_.size(); }
  const IndexedEdge& edge(std::size_t i) const { return edges_[i]; }
  const PLCurve& curve_of(std::size_t edge) const { return d_->curves[edges_[edge].curve].curve; }
  const std::vector<std::size_t>& edges_on_curve(std::size_t curve) const { return by_curve_[curve]; }

  Point2 point(std::size_t edge, double phi) const {
    return edge_point(*edges_[edge].edge, curve_of(edge), phi);
  }
  double param(std::size_t edge, double phi) const {
    return edge_param(*edges_[edge].edge, curve_of(edge), phi);
  }

  /// Edge containing parameter t of a curve, with its fraction. Prefers an
  /// edge on which t is interior when t sits on a shared endpoint.
  std::optional<std::pair<std::size_t, double>> locate(std::size_t curve, double t) const {
    std::optional<std::pair<std::size_t, double>> best;
    for (std::size_t e : by_curve_[curve]) {
      auto phi = edge_fraction(*edges_[e].edge, d_->curves[curve].curve, t);
      if (!phi) continue;
      if (!best || std::min(*phi, 1 - *phi) > std::min(best->second, 1 - best->second))
        best = std::make_pair(e, *phi);
    }
    return best;
  }

 private:
  const DeckerDiagram* d_;
  std::vector<IndexedEdge> edges_;
  std::vector<std::vector<std::size_t>> by_curve_;
};

/// The over-to-under correspondence and its inverse: maps a point of a paired
/// edge to the matching point of its partner edge.
inline EdgePoint tau(const DeckerDiagram& d, const EdgePoint& p) {
  const Edge* e = d.find_edge(p.edge);
  if (!e) throw StructuralError("unknown edge '" + p.edge + "'");
  const Pairing* pr = d.find_pairing(p.edge);
  if (!pr) throw StructuralError("edge '" + p.edge + "' belongs to no pairing");
  const std::string& other = pr->over_edge == p.edge ? pr->under_edge : pr->over_edge;
  const Edge* f = d.find_edge(other);
  if (!f) throw StructuralError("pairing references unknown edge '" + other + "'");
  const NamedCurve* ce = d.find_curve(e->curve);
  const NamedCurve* cf = d.find_curve(f->curve);
  if (!ce || !cf) throw StructuralError("edge references unknown curve");
  auto phi = edge_fraction(*e, ce->curve, p.t, 1e-9);
  if (!phi) throw DomainError("parameter " + std::to_string(p.t) + " is not on edge '" + p.edge + "'");
  return {other, edge_param(*f, cf->curve, partner_fraction(pr->orientation, *phi))};
}

// ---------------------------------------------------------------------------
// File format

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ParseError(where + ": unknown key '" + it.key() + "'");
  }
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
  return *it;
}

inline double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(where + ": non-finite number");
  return x;
}

inline std::string string_at(const json& v, const std::string& where) {
  if (!v.is_string()) throw ParseError(where + ": expected a string");
  return v.get<std::string>();
}

inline const json& array_at(const json& obj, const char* key, const std::string& where) {
  static const json kEmpty = json::array();
  auto it = obj.find(key);
  if (it == obj.end()) return kEmpty;
  if (!it->is_array()) throw ParseError(where + "." + key + ": expected an array");
  return *it;
}

}  // namespace detail

/// Parses the JSON diagram format. Errors name the offending line (syntax) or
/// field path (structure).
inline DeckerDiagram parse_diagram(std::string_view text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("top level: expected an object");
  detail::reject_unknown_keys(root, {"name", "note", "curves", "edges", "pairings", "triple_vertices"},
                              "top level");
  DeckerDiagram d;
  d.name = detail::string_at(detail::require(root, "name", "top level"), "name");
  if (root.contains("note")) d.note = detail::string_at(root["note"], "note");

  std::set<std::string> curve_ids, edge_ids, vertex_ids;
  const json& curves = detail::array_at(root, "curves", "top level");
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const std::string where = "curves[" + std::to_string(i) + "]";
    const json& c = curves[i];
    if (!c.is_object()) throw ParseError(where + ": expected an object");
    detail::reject_unknown_keys(c, {"id", "closed", "vertices"}, where);
    NamedCurve nc;
    nc.id = detail::string_at(detail::require(c, "id", where), where + ".id");
    if (!curve_ids.insert(nc.id).second) throw ParseError(where + ".id: duplicate curve id '" + nc.id + "'");
    const json& closed = detail::require(c, "closed", where);
    if (!closed.is_boolean()) throw ParseError(where + ".closed: expected a boolean");
    nc.curve.closed = closed.get<bool>();
    const json& verts = detail::require(c, "vertices", where);
    if (!verts.is_array()) throw ParseError(where + ".vertices: expected an array");
    for (std::size_t k = 0; k < verts.size(); ++k) {
      const std::string vw = where + ".vertices[" + std::to_string(k) + "]";
      if (!verts[k].is_array() || verts[k].size() != 2) throw ParseError(vw + ": expected [x, y]");
      nc.curve.vertices.push_back({detail::number_at(verts[k][0], vw), detail::number_at(verts[k][1], vw)});
    }
    d.curves.push_back(std::move(nc));
  }

  const json& edges = detail::array_at(root, "edges", "top level");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const json& e = edges[i];
    if (!e.is_object()) throw ParseError(where + ": expected an object");
    detail::reject_unknown_keys(e, {"id", "curve", "t0", "t1", "label"}, where);
    Edge ed;
    ed.id = detail::string_at(detail::require(e, "id", where), where + ".id");
    if (!edge_ids.insert(ed.id).second) throw ParseError(where + ".id: duplicate edge id '" + ed.id + "'");
    ed.curve = detail::string_at(detail::require(e, "curve", where), where + ".curve");
    if (!curve_ids.count(ed.curve)) throw ParseError(where + ".curve: unknown curve id '" + ed.curve + "'");
    ed.t0 = detail::number_at(detail::require(e, "t0", where), where + ".t0");
    ed.t1 = detail::number_at(detail::require(e, "t1", where), where + ".t1");
    const std::string label = detail::string_at(detail::require(e, "label", where), where + ".label");
    if (label == "over") ed.label = Label::over;
    else if (label == "under") ed.label = Label::under;
    else throw ParseError(where + ".label: expected \"over\" or \"under\", got '" + label + "'");
    d.edges.push_back(std::move(ed));
  }

  const json& pairings = detail::array_at(root, "pairings", "top level");
  for (std::size_t i = 0; i < pairings.size(); ++i) {
    const std::string where = "pairings[" + std::to_string(i) + "]";
    const json& p = pairings[i];
    if (!p.is_object()) throw ParseError(where + ": expected an object");
    detail::reject_unknown_keys(p, {"over", "under", "orientation"}, where);
    Pairing pr;
    pr.over_edge = detail::string_at(detail::require(p, "over", where), where + ".over");
    pr.under_edge = detail::string_at(detail::require(p, "under", where), where + ".under");
    for (const auto* id : {&pr.over_edge, &pr.under_edge})
      if (!edge_ids.count(*id)) throw ParseError(where + ": unknown edge id '" + *id + "'");
    const std::string o = detail::string_at(detail::require(p, "orientation", where), where + ".orientation");
    if (o == "preserving") pr.orientation = Orientation::preserving;
    else if (o == "reversing") pr.orientation = Orientation::reversing;
    else throw ParseError(where + ".orientation: expected \"preserving\" or \"reversing\"");
    d.pairings.push_back(std::move(pr));
  }

  const json& tvs = detail::array_at(root, "triple_vertices", "top level");
  for (std::size_t i = 0; i < tvs.size(); ++i) {
    const std::string where = "triple_vertices[" + std::to_string(i) + "]";
    const json& v = tvs[i];
    if (!v.is_object()) throw ParseError(where + ": expected an object");
    detail::reject_unknown_keys(v, {"id", "incident", "heights"}, where);
    TripleVertex tv;
    tv.id = detail::string_at(detail::require(v, "id", where), where + ".id");
    if (!vertex_ids.insert(tv.id).second) throw ParseError(where + ".id: duplicate vertex id '" + tv.id + "'");
    const json& inc = detail::require(v, "incident", where);
    if (!inc.is_array() || inc.size() != 3) throw ParseError(where + ".incident: expected three entries");
    for (std::size_t k = 0; k < 3; ++k) {
      const std::string iw = where + ".incident[" + std::to_string(k) + "]";
      if (!inc[k].is_object()) throw ParseError(iw + ": expected an object");
      detail::reject_unknown_keys(inc[k], {"curve", "t"}, iw);
      tv.incident[k].curve = detail::string_at(detail::require(inc[k], "curve", iw), iw + ".curve");
      if (!curve_ids.count(tv.incident[k].curve))
        throw ParseError(iw + ".curve: unknown curve id '" + tv.incident[k].curve + "'");
      tv.incident[k].t = detail::number_at(detail::require(inc[k], "t", iw), iw + ".t");
    }
    const json& hs = detail::require(v, "heights", where);
    if (!hs.is_array() || hs.size() != 3) throw ParseError(where + ".heights: expected three entries");
    for (std::size_t k = 0; k < 3; ++k) {
      const std::string h = detail::string_at(hs[k], where + ".heights[" + std::to_string(k) + "]");
      if (h == "top") tv.heights[k] = Height::top;
      else if (h == "middle") tv.heights[k] = Height::middle;
      else if (h == "bottom") tv.heights[k] = Height::bottom;
      else throw ParseError(where + ".heights[" + std::to_string(k) + "]: unknown height '" + h + "'");
    }
    d.triple_vertices.push_back(std::move(tv));
  }
  return d;
}

inline nlohmann::json diagram_to_json(const DeckerDiagram& d) {
  using nlohmann::json;
  json root = json::object();
  root["name"] = d.name;
  if (!d.note.empty()) root["note"] = d.note;
  json curves = json::array();
  for (const auto& c : d.curves) {
    json verts = json::array();
    for (const auto& v : c.curve.vertices) verts.push_back(json::array({v.x1, v.x2}));
    curves.push_back({{"id", c.id}, {"closed", c.curve.closed}, {"vertices", verts}});
  }
  root["curves"] = curves;
  json edges = json::array();
  for (const auto& e : d.edges)
    edges.push_back({{"id", e.id}, {"curve", e.curve}, {"t0", e.t0}, {"t1", e.t1}, {"label", to_string(e.label)}});
  root["edges"] = edges;
  json pairings = json::array();
  for (const auto& p : d.pairings)
    pairings.push_back({{"over", p.over_edge}, {"under", p.under_edge}, {"orientation", to_string(p.orientation)}});
  root["pairings"] = pairings;
  json tvs = json::array();
  for (const auto& v : d.triple_vertices) {
    json inc = json::array();
    for (const auto& i : v.incident) inc.push_back({{"curve", i.curve}, {"t", i.t}});
    json hs = json::array();
    for (Height h : v.heights) hs.push_back(to_string(h));
    tvs.push_back({{"id", v.id}, {"incident", inc}, {"heights", hs}});
  }
  root["triple_vertices"] = tvs;
  return root;
}

inline std::string serialize_diagram(const DeckerDiagram& d) { return diagram_to_json(d).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  curve_geometry,
  outside_disk,
  self_intersection,
  dangling_reference,
  edge_partition,
  unpaired_edge,
  not_involutive,
  label_complementarity,
  triple_vertex,
};

inline const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::curve_geometry: return "curve-geometry";
    case ViolationKind::outside_disk: return "outside-disk";
    case ViolationKind::self_intersection: return "self-intersection";
    case ViolationKind::dangling_reference: return "dangling-reference";
    case ViolationKind::edge_partition: return "edge-partition";
    case ViolationKind::unpaired_edge: return "unpaired-edge";
    case ViolationKind::not_involutive: return "not-involutive";
    case ViolationKind::label_complementarity: return "label-complementarity";
    default: return "triple-vertex";
  }
}

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  bool has(ViolationKind k) const {
    return std::any_of(violations.begin(), violations.end(), [k](const Violation& v) { return v.kind == k; });
  }
};

namespace detail {

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  double s = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return distance(p, lerp(a, b, s));
}

inline double segment_distance(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

// Parameters t at which any over/under edge passes within tol of p.
inline std::vector<std::pair<std::size_t, double>> edges_through(const DiagramIndex& ix, Point2 p,
                                                                 double tol) {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t e = 0; e < ix.edge_count(); ++e) {
    const std::vector<double> phis = edge_vertex_fractions(*ix.edge(e).edge, ix.curve_of(e));
    for (std::size_t k = 0; k + 1 < phis.size(); ++k) {
      const Point2 a = ix.point(e, phis[k]), b = ix.point(e, phis[k + 1]);
      const Point2 ab = b - a;
      const double len2 = dot(ab, ab);
      const double s = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
      if (distance(p, lerp(a, b, s)) <= tol) {
        out.emplace_back(e, phis[k] + s * (phis[k + 1] - phis[k]));
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Structural and geometric checks. Violations are returned as data.
inline ValidationReport validate(const DeckerDiagram& d, const Tolerance& tol = {}) {
  ValidationReport r;
  auto add = [&r](ViolationKind k, std::string msg) { r.violations.push_back({k, std::move(msg)}); };

  for (const auto& nc : d.curves) {
    const PLCurve& c = nc.curve;
    const std::string who = "curve '" + nc.id + "'";
    const std::size_t need = c.closed ? 3 : 2;
    if (c.vertices.size() < need) {
      add(ViolationKind::curve_geometry, who + " has too few vertices");
      continue;
    }
    bool repeated = false;
    for (std::size_t i = 0; i < c.segment_count(); ++i)
      if (distance(c.segment_start(i), c.segment_end(i)) <= tol.eq_tol) repeated = true;
    if (repeated) add(ViolationKind::curve_geometry, who + " has coincident consecutive vertices");
    for (std::size_t i = 0; i < c.vertices.size(); ++i)
      if (norm(c.vertices[i]) > 1.0 + tol.sep_tol) {
        add(ViolationKind::outside_disk, who + " vertex " + std::to_string(i) + " lies outside the unit disk");
        break;
      }
    const std::size_t n = c.segment_count();
    bool simple = true;
    for (std::size_t i = 0; i < n && simple; ++i)
      for (std::size_t j = i + 1; j < n && simple; ++j) {
        const bool adjacent = j == i + 1 || (c.closed && i == 0 && j == n - 1);
        if (adjacent) {
          // Folding back onto the previous segment.
          const std::size_t first = (j == i + 1) ? i : j, second = (j == i + 1) ? j : i;
          const Point2 u = c.segment_end(first) - c.segment_start(first);
          const Point2 v = c.segment_end(second) - c.segment_start(second);
          if (std::abs(cross(u, v)) <= tol.eq_tol * norm(u) * norm(v) && dot(u, v) < 0) simple = false;
          continue;
        }
        if (detail::segment_distance(c.segment_start(i), c.segment_end(i), c.segment_start(j),
                                     c.segment_end(j)) <= tol.sep_tol)
          simple = false;
      }
    if (!simple) add(ViolationKind::self_intersection, who + " comes within sep_tol of itself");
  }

  // Edges: references and partition of each curve's parameter domain.
  std::map<std::string, std::vector<const Edge*>> per_curve;
  for (const auto& e : d.edges) {
    const NamedCurve* c = d.find_curve(e.curve);
    if (!c) {
      add(ViolationKind::dangling_reference, "edge '" + e.id + "' references unknown curve '" + e.curve + "'");
      continue;
    }
    const bool range_ok = c->curve.closed ? (e.t0 >= 0 && e.t0 < 1 && e.t1 > 0 && e.t1 <= 1)
                                          : (e.t0 >= 0 && e.t1 <= 1 && e.t1 > e.t0);
    if (!range_ok || e.t0 == e.t1) {
      add(ViolationKind::edge_partition, "edge '" + e.id + "' has an invalid parameter interval");
      continue;
    }
    per_curve[e.curve].push_back(&e);
  }
  for (const auto& nc : d.curves) {
    auto it = per_curve.find(nc.id);
    if (it == per_curve.end()) {
      add(ViolationKind::edge_partition, "curve '" + nc.id + "' carries no edges");
      continue;
    }
    std::vector<const Edge*> es = it->second;
    std::sort(es.begin(), es.end(), [](const Edge* a, const Edge* b) { return a->t0 < b->t0; });
    double total = 0;
    for (const Edge* e : es) total += edge_length(*e);
    bool ok = std::abs(total - 1.0) <= 1e-9;
    for (std::size_t i = 0; ok && i < es.size(); ++i) {
      const Edge* a = es[i];
      const Edge* b = es[(i + 1) % es.size()];
      if (!nc.curve.closed && i + 1 == es.size()) break;
      double gap = wrap01(b->t0 - a->t1 + 0.5) - 0.5;  // signed, modulo 1
      if (std::abs(gap) > 1e-9) ok = false;
    }
    if (!nc.curve.closed && ok) ok = es.front()->t0 <= 1e-9 && es.back()->t1 >= 1 - 1e-9;
    if (!ok) add(ViolationKind::edge_partition, "edges of curve '" + nc.id + "' do not partition its domain");
  }

  // Pairings: every edge in exactly one pairing, complementary labels.
  std::map<std::string, int> uses;
  for (const auto& p : d.pairings) {
    const Edge* o = d.find_edge(p.over_edge);
    const Edge* u = d.find_edge(p.under_edge);
    if (!o || !u) {
      add(ViolationKind::dangling_reference, "pairing references unknown edge '" + (o ? p.under_edge : p.over_edge) + "'");
      continue;
    }
    ++uses[p.over_edge];
    ++uses[p.under_edge];
    if (p.over_edge == p.under_edge)
      add(ViolationKind::not_involutive, "edge '" + p.over_edge + "' is paired with itself");
    if (o->label != Label::over || u->label != Label::under)
      add(ViolationKind::label_complementarity,
          "pairing " + p.over_edge + " -> " + p.under_edge + " does not join an over edge to an under edge");
  }
  for (const auto& e : d.edges) {
    const int n = uses[e.id];
    if (n == 0) add(ViolationKind::unpaired_edge, "edge '" + e.id + "' belongs to no pairing");
    if (n > 1) add(ViolationKind::not_involutive, "edge '" + e.id + "' appears in " + std::to_string(n) + " pairings");
  }

  // Triple vertices: each pair of sheets (higher, lower) must be joined by a
  // pairing whose over edge passes through the higher preimage and whose
  // correspondence lands on the lower preimage.
  if (!d.triple_vertices.empty() && r.valid()) {
    const DiagramIndex ix(d);
    for (const auto& tv : d.triple_vertices) {
      const std::string who = "triple vertex '" + tv.id + "'";
      std::array<int, 3> count{0, 0, 0};
      for (Height h : tv.heights) ++count[static_cast<int>(h)];
      if (count != std::array<int, 3>{1, 1, 1}) {
        add(ViolationKind::triple_vertex, who + " heights are not a permutation of top/middle/bottom");
        continue;
      }
      std::array<Point2, 3> at{};  // indexed by Height
      bool ok = true;
      for (std::size_t k = 0; k < 3; ++k) {
        const NamedCurve* c = d.find_curve(tv.incident[k].curve);
        const double t = tv.incident[k].t;
        if (!c || !(t >= 0 && t <= 1)) {
          add(ViolationKind::triple_vertex, who + " incidence " + std::to_string(k) + " is not on its curve");
          ok = false;
          break;
        }
        at[static_cast<int>(tv.heights[k])] = eval_curve_wrapped(c->curve, t);
      }
      if (!ok) continue;
      for (auto [hi, lo] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
        bool matched = false;
        for (auto [e, phi] : detail::edges_through(ix, at[hi], tol.sep_tol)) {
          if (!ix.edge(e).over()) continue;
          const std::size_t f = ix.edge(e).partner;
          const Point2 q = ix.point(f, partner_fraction(ix.edge(e).orientation, phi));
          if (distance(q, at[lo]) <= 10 * tol.sep_tol) matched = true;
        }
        if (!matched)
          add(ViolationKind::triple_vertex, who + ": no pairing carries the " + std::string(to_string(Height(hi))) +
                                                " sheet onto the " + to_string(Height(lo)) + " sheet");
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Structural operations

inline DeckerDiagram transform_diagram(const DeckerDiagram& d, double scale, Point2 shift,
                                       const std::string& prefix = {}) {
  DeckerDiagram out;
  out.name = d.name;
  for (const auto& c : d.curves) {
    NamedCurve nc{prefix + c.id, c.curve};
    for (auto& v : nc.curve.vertices) v = scale * v + shift;
    out.curves.push_back(std::move(nc));
  }
  for (auto e : d.edges) {
    e.id = prefix + e.id;
    e.curve = prefix + e.curve;
    out.edges.push_back(std::move(e));
  }
  for (auto p : d.pairings) {
    p.over_edge = prefix + p.over_edge;
    p.under_edge = prefix + p.under_edge;
    out.pairings.push_back(std::move(p));
  }
  for (auto tv : d.triple_vertices) {
    tv.id = prefix + tv.id;
    for (auto& i : tv.incident) i.curve = prefix + i.curve;
    out.triple_vertices.push_back(std::move(tv));
  }
  return out;
}

/// Disjoint union realizing the connect sum: d1 is shrunk into the left half
/// of the disk and d2 into the right half, with ids prefixed "a." and "b.".
inline DeckerDiagram strip_union(const DeckerDiagram& d1, const DeckerDiagram& d2) {
  constexpr double kScale = 0.49;
  DeckerDiagram left = transform_diagram(d1, kScale, {-0.5, 0.0}, "a.");
  DeckerDiagram right = transform_diagram(d2, kScale, {0.5, 0.0}, "b.");
  DeckerDiagram out;
  out.name = d1.name + "#" + d2.name;
  auto append = [](auto& dst, auto& src) { dst.insert(dst.end(), src.begin(), src.end()); };
  append(out.curves, left.curves);
  append(out.curves, right.curves);
  append(out.edges, left.edges);
  append(out.edges, right.edges);
  append(out.pairings, left.pairings);
  append(out.pairings, right.pairings);
  append(out.triple_vertices, left.triple_vertices);
  append(out.triple_vertices, right.triple_vertices);
  return out;
}

/// Inserts factor-1 extra vertices on every segment without moving the curve.
/// With skew = 0 the new vertices sit at equal fractions and every existing
/// parameter keeps its value; skew in (-1, 1) places them at
/// x + skew*x*(1-x), which changes the parameterization and with it the affine
/// correspondence between paired edges. Edge ends and triple-vertex
/// parameters are remapped so they stay on the same planar points.
inline DeckerDiagram resample_diagram(const DeckerDiagram& d, int factor, double skew = 0.0) {
  if (factor < 1) throw DomainError("resample factor must be >= 1");
  if (!(std::abs(skew) < 1)) throw DomainError("resample skew must lie in (-1, 1)");
  auto warp = [&](double x) { return x + skew * x * (1 - x); };
  std::map<std::string, std::size_t> old_n;
  DeckerDiagram out = d;
  for (auto& nc : out.curves) {
    const PLCurve& c = d.find_curve(nc.id)->curve;
    old_n[nc.id] = c.segment_count();
    PLCurve r{{}, c.closed};
    for (std::size_t i = 0; i < c.segment_count(); ++i)
      for (int j = 0; j < factor; ++j) r.vertices.push_back(lerp(c.segment_start(i), c.segment_end(i), warp(double(j) / factor)));
    if (!c.closed && !c.vertices.empty()) r.vertices.push_back(c.vertices.back());
    nc.curve = std::move(r);
  }
  auto remap = [&](const std::string& curve, double t) {
    const std::size_t n = old_n.at(curve);
    if (n == 0 || t >= 1.0) return t;
    double scaled = t * static_cast<double>(n);
    auto seg = static_cast<std::size_t>(std::floor(scaled));
    if (seg >= n) seg = n - 1;
    const double f = scaled - static_cast<double>(seg);
    int j = 0;
    while (j + 1 < factor && warp(double(j + 1) / factor) <= f) ++j;
    const double a = warp(double(j) / factor), b = warp(double(j + 1) / factor);
    const double local = (f - a) / (b - a);
    return (static_cast<double>(seg * factor + j) + local) / static_cast<double>(n * factor);
  };
  for (auto& e : out.edges) {
    e.t0 = remap(e.curve, e.t0);
    e.t1 = remap(e.curve, e.t1);
  }
  for (auto& tv : out.triple_vertices)
    for (auto& inc : tv.incident) inc.t = remap(inc.curve, inc.t);
  return out;
}

/// Moves every vertex by a pseudo-random offset of norm <= magnitude keyed by
/// (seed, curve id, vertex index). Vertices that coincide within sep_tol
/// (curves meeting at triple-point preimages) share the offset of their first
/// member, so incidences survive. Offsets that would leave the unit disk are
/// shrunk radially.
inline DeckerDiagram perturb_diagram(const DeckerDiagram& d, std::uint64_t seed, double magnitude,
                                     const Tolerance& tol = {}) {
  if (!(magnitude >= 0)) throw DomainError("perturbation magnitude must be non-negative");
  DeckerDiagram out = d;
  if (magnitude == 0) return out;
  struct Ref {
    std::size_t curve, vertex;
  };
  std::vector<Ref> refs;
  for (std::size_t c = 0; c < d.curves.size(); ++c)
    for (std::size_t v = 0; v < d.curves[c].curve.vertices.size(); ++v) refs.push_back({c, v});
  auto pos = [&d](const Ref& r) { return d.curves[r.curve].curve.vertices[r.vertex]; };
  // Group coincident vertices; sorting by x1 keeps the scan near-linear.
  std::vector<std::size_t> order(refs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Point2 pa = pos(refs[a]), pb = pos(refs[b]);
    return pa.x1 != pb.x1 ? pa.x1 < pb.x1 : a < b;
  });
  std::vector<std::size_t> leader(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) leader[i] = i;
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const Point2 pa = pos(refs[order[a]]), pb = pos(refs[order[b]]);
      if (pb.x1 - pa.x1 > tol.sep_tol) break;
      if (distance(pa, pb) <= tol.sep_tol) {
        const std::size_t la = leader[order[a]], lb = leader[order[b]];
        const std::size_t l = std::min(la, lb);
        for (auto& x : leader)
          if (x == la || x == lb) x = l;
      }
    }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const Ref& lead = refs[leader[i]];
    Point2 off = magnitude * disk_offset(noise_key(seed, d.curves[lead.curve].id, lead.vertex));
    Point2& v = out.curves[refs[i].curve].curve.vertices[refs[i].vertex];
    const Point2 p = v;
    if (norm(p + off) > 1.0) {
      // Largest lambda in [0,1] with |p + lambda*off| <= 1.
      const double a = dot(off, off), b = 2 * dot(p, off), c = dot(p, p) - 1.0;
      const double disc = b * b - 4 * a * c;
      double lam = disc >= 0 ? (-b + std::sqrt(disc)) / (2 * a) : 0.0;
      off = std::clamp(lam, 0.0, 1.0) * off;
    }
    v = p + off;
  }
  return out;
}

}  // namespace knotmu
