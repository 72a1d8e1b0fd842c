#pragma once

// Polygonal knots in R^3: file format, validity, closed-to-long conversion
// and connected sum.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "knotmu/error.hpp"
#include "knotmu/geom.hpp"

namespace knotmu {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Point3 operator-(Point3 a) { return {-a.x, -a.y, -a.z}; }
  friend Point3 operator*(double k, Point3 a) { return {k * a.x, k * a.y, k * a.z}; }
  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Point3 cross(Point3 a, Point3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Point3 a) { return std::sqrt(dot(a, a)); }
inline double distance(Point3 a, Point3 b) { return norm(a - b); }
inline Point3 normalized(Point3 a) { return (1.0 / norm(a)) * a; }

/// A polygon in R^3. A long knot runs in from -infinity along the x1-axis to
/// vertices.front() and out from vertices.back() to +infinity; both of those
/// vertices lie on the axis.
struct PolyKnot {
  std::vector<Point3> vertices;
  bool long_knot = false;

  std::size_t segment_count() const {
    if (vertices.size() < 2) return 0;
    return long_knot ? vertices.size() - 1 : vertices.size();
  }
  Point3 segment_start(std::size_t i) const { return vertices[i]; }
  Point3 segment_end(std::size_t i) const { return vertices[(i + 1) % vertices.size()]; }
};

inline PolyKnot parse_knot(std::string_view text) {
  PolyKnot k;
  std::istringstream in{std::string(text)};
  std::string line;
  bool seen_header = false, seen_point = false;
  for (int n = 1; std::getline(in, line); ++n) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "long" || first == "closed") {
      if (seen_header || seen_point) throw ParseError("line " + std::to_string(n) + ": header must come first");
      k.long_knot = first == "long";
      seen_header = true;
      continue;
    }
    Point3 p;
    std::istringstream row(line);
    std::string extra;
    if (!(row >> p.x >> p.y >> p.z)) throw ParseError("line " + std::to_string(n) + ": expected 'x y z'");
    if (row >> extra) throw ParseError("line " + std::to_string(n) + ": trailing text '" + extra + "'");
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw ParseError("line " + std::to_string(n) + ": non-finite coordinate");
    k.vertices.push_back(p);
    seen_point = true;
  }
  return k;
}

inline std::string serialize_knot(const PolyKnot& k) {
  std::ostringstream out;
  out.precision(17);
  out << (k.long_knot ? "long" : "closed") << "\n";
  for (const auto& p : k.vertices) out << p.x << " " << p.y << " " << p.z << "\n";
  return out.str();
}

namespace detail {

/// Distance between segments p0p1 and q0q1.
inline double segment_distance(Point3 p0, Point3 p1, Point3 q0, Point3 q1) {
  const Point3 u = p1 - p0, v = q1 - q0, w = p0 - q0;
  const double a = dot(u, u), b = dot(u, v), c = dot(v, v), d = dot(u, w), e = dot(v, w);
  const double den = a * c - b * b;
  double s = den > 1e-14 * a * c ? std::clamp((b * e - c * d) / den, 0.0, 1.0) : 0.0;
  double t = c > 0 ? std::clamp((b * s + e) / c, 0.0, 1.0) : 0.0;
  s = a > 0 ? std::clamp((b * t - d) / a, 0.0, 1.0) : 0.0;
  return distance(p0 + s * u, q0 + t * v);
}

}  // namespace detail

/// Throws StructuralError when the polygon is too short, has repeated
/// consecutive vertices, comes within sep_tol of itself, or (long knots)
/// has end vertices off the axis or tails that re-enter the middle.
inline void validate_knot(const PolyKnot& k, const Tolerance& tol = {}) {
  const std::size_t n = k.vertices.size();
  if (n < 4) throw StructuralError("a knot needs at least 4 vertices");
  const std::size_t m = k.segment_count();
  for (std::size_t i = 0; i < m; ++i)
    if (distance(k.segment_start(i), k.segment_end(i)) < tol.sep_tol)
      throw StructuralError("vertices " + std::to_string(i) + " and " + std::to_string((i + 1) % n) + " coincide");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 2; j < m; ++j) {
      if (!k.long_knot && i == 0 && j == m - 1) continue;
      if (detail::segment_distance(k.segment_start(i), k.segment_end(i), k.segment_start(j), k.segment_end(j)) <
          tol.sep_tol)
        throw StructuralError("segments " + std::to_string(i) + " and " + std::to_string(j) + " come within sep_tol");
    }
  if (!k.long_knot) return;
  const Point3 a = k.vertices.front(), b = k.vertices.back();
  if (std::hypot(a.y, a.z) > tol.eq_tol || std::hypot(b.y, b.z) > tol.eq_tol)
    throw StructuralError("long knot end vertices must lie on the x1-axis");
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (!(k.vertices[i].x > a.x + tol.sep_tol && k.vertices[i].x < b.x - tol.sep_tol))
      throw StructuralError("long knot tails re-enter the middle at vertex " + std::to_string(i));
}

/// Opens a closed knot near its vertex v of largest x1: the two edges at v
/// are cut where x1 passes halfway to the next-largest vertex, and the cut
/// ends are led around the outside of the knot onto the axis.
inline PolyKnot to_long(const PolyKnot& k) {
  if (k.long_knot) return k;
  const std::size_t n = k.vertices.size();
  if (n < 4) throw StructuralError("a knot needs at least 4 vertices");
  std::size_t top = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (k.vertices[i].x > k.vertices[top].x) top = i;
  double second = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    if (i != top) second = std::max(second, k.vertices[i].x);
  const Point3 v = k.vertices[top], next = k.vertices[(top + 1) % n], prev = k.vertices[(top + n - 1) % n];
  if (!(v.x > second)) throw DegenerateConfiguration("largest x1 is attained at two vertices");
  const double cut = 0.5 * (v.x + second);
  const Point3 a = next + ((cut - next.x) / (v.x - next.x)) * (v - next);
  const Point3 b = prev + ((cut - prev.x) / (v.x - prev.x)) * (v - prev);

  double radius = 0;
  for (const auto& p : k.vertices) radius = std::max(radius, norm(p));
  const double far = radius + 2.0, x_in = v.x + 1.0, x_out = v.x + 2.0;

  PolyKnot out;
  out.long_knot = true;
  out.vertices = {{-far, 0, 0}, {0.5 - far, far, far / 3}, {x_in, far, far / 2}, {x_in, a.y + 0.3, a.z + 0.2}, a};
  for (std::size_t i = 1; i < n; ++i) out.vertices.push_back(k.vertices[(top + i) % n]);
  out.vertices.push_back(b);
  out.vertices.push_back({x_out - 0.5, b.y - 0.2, b.z + 0.3});
  out.vertices.push_back({x_out, 0, 0});
  return out;
}

/// Places k2 to the right of k1 along the axis. The two inner axis vertices
/// are dropped and the factors are joined through one off-axis vertex, so
/// only the outer ends touch the axis. A straight factor is a unit: the other
/// factor comes back, translated to start where k1 starts.
inline PolyKnot knot_connect(const PolyKnot& k1, const PolyKnot& k2) {
  if (!k1.long_knot || !k2.long_knot) throw DomainError("knot_connect expects long knots");
  auto straight = [](const PolyKnot& k) {
    return std::all_of(k.vertices.begin(), k.vertices.end(), [](Point3 p) { return p.y == 0 && p.z == 0; });
  };
  if (straight(k1) && !k1.vertices.empty()) {
    PolyKnot out = k2;
    const double dx = k1.vertices.front().x - (k2.vertices.empty() ? 0 : k2.vertices.front().x);
    for (auto& p : out.vertices) p.x += dx;
    return out;
  }
  if (straight(k2) || k1.vertices.empty()) return straight(k2) ? k1 : k2;
  if (k1.vertices.size() < 3 || k2.vertices.size() < 3) throw StructuralError("long knot too short to connect");
  const double shift = k1.vertices.back().x + 1.0 - k2.vertices.front().x;
  PolyKnot out = k1;
  out.vertices.back() = {k1.vertices.back().x + 0.5, 0.4, 0.3};
  // Turning k2 about the axis is an isotopy of long knots; it keeps edges of
  // two copies of one knot from being parallel.
  const double c = std::cos(1.0), s = std::sin(1.0);
  for (std::size_t i = 1; i < k2.vertices.size(); ++i) {
    const Point3 p = k2.vertices[i];
    out.vertices.push_back({p.x + shift, c * p.y - s * p.z, s * p.y + c * p.z});
  }
  return out;
}

/// Moves every vertex by up to `magnitude` (deterministic in seed). Long-knot
/// end vertices only move along the axis.
inline PolyKnot perturb_knot(const PolyKnot& k, std::uint64_t seed, double magnitude) {
  PolyKnot out = k;
  for (std::size_t i = 0; i < out.vertices.size(); ++i) {
    const std::uint64_t key = noise_key(seed, "knot", i);
    const Point2 a = disk_offset(key), b = disk_offset(splitmix64(key ^ 0x5851F42D4C957F2Dull));
    Point3 d{a.x1, a.x2, b.x1};
    const double len = norm(d);
    if (len > 1) d = (1.0 / len) * d;
    const bool end = out.long_knot && (i == 0 || i + 1 == out.vertices.size());
    if (end) d = {d.x, 0, 0};
    out.vertices[i] = out.vertices[i] + magnitude * d;
  }
  return out;
}

inline PolyKnot transform_knot(const PolyKnot& k, const double m[3][3], Point3 shift = {}) {
  PolyKnot out = k;
  for (auto& p : out.vertices)
    p = Point3{m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z, m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
               m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z} +
        shift;
  return out;
}

}  // namespace knotmu
