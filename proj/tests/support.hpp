#pragma once

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "knotmu/diagram.hpp"

namespace knotmu::testing {

inline const std::vector<std::string>& corpus_names() {
  static const std::vector<std::string> names{"0_1", "8_1", "9_1", "10_1", "10_2", "10_3"};
  return names;
}

inline std::string source_path(const std::string& rel) { return std::string(KNOTMU_SOURCE_DIR) + "/" + rel; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline DeckerDiagram shipped(const std::string& name) {
  return parse_diagram(read_file(source_path("knots/" + name + ".diagram")));
}

inline NamedCurve polygon_circle(const std::string& id, Point2 c, double r, double phase, int n) {
  NamedCurve nc{id, {{}, true}};
  for (int i = 0; i < n; ++i) {
    const double a = phase + 2 * std::numbers::pi * i / n;
    nc.curve.vertices.push_back({c.x1 + r * std::cos(a), c.x2 + r * std::sin(a)});
  }
  return nc;
}

/// Six disjoint circles in three over/under pairs with random placement and
/// random orientation flags.
inline DeckerDiagram random_circle_diagram(std::mt19937_64& rng, int vertices = 24) {
  std::uniform_real_distribution<double> pos(-0.8, 0.8), rad(0.08, 0.32), ph(0, 2 * std::numbers::pi);
  std::bernoulli_distribution flip(0.5);
  struct C {
    Point2 c;
    double r;
  };
  std::vector<C> cs;
  while (cs.size() < 6) {
    const C c{{pos(rng), pos(rng)}, rad(rng)};
    if (norm(c.c) + c.r > 0.95) continue;
    bool ok = true;
    for (const auto& o : cs) ok = ok && distance(c.c, o.c) >= c.r + o.r + 0.03;
    if (ok) cs.push_back(c);
  }
  DeckerDiagram d;
  d.name = "random";
  const char* ids = "ABCDEF";
  for (int i = 0; i < 6; ++i) {
    const std::string id(1, ids[i]);
    d.curves.push_back(polygon_circle(id, cs[i].c, cs[i].r, ph(rng), vertices));
    d.edges.push_back({id, id, 0.0, 1.0, i % 2 ? Label::over : Label::under});
  }
  for (auto [o, u] : {std::pair{"D", "A"}, {"B", "E"}, {"F", "C"}})
    d.pairings.push_back({o, u, flip(rng) ? Orientation::reversing : Orientation::preserving});
  return d;
}

}  // namespace knotmu::testing
