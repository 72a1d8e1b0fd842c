#pragma once

// Standalone SVG drawings of decker diagrams.

#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "knotmu/diagram.hpp"
#include "knotmu/mu2.hpp"

namespace knotmu {

struct RenderOptions {
  int size = 640;  // pixels, square canvas
  bool labels = true;
};

namespace detail {

inline std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string curve_colour(const std::string& id, std::size_t index) {
  static const std::set<std::string> named{"black",  "blue",   "brown", "cyan",   "gold",  "gray",
                                           "green",  "magenta", "maroon", "navy", "olive", "orange",
                                           "pink",   "purple", "red",   "teal",   "violet"};
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  if (named.count(id)) return id;
  return palette[index % 10];
}

}  // namespace detail

/// Curves stroked per id, edges marked "o"/"u" at their midpoints, pairings
/// as dashed arrows from over to under edge, triple vertices as squares and
/// the supplied cycles as vertical chords.
inline std::string render_svg(const DeckerDiagram& d, const std::vector<FourCycle>& four = {},
                              const std::vector<TwoCycle>& two = {}, const RenderOptions& opt = {}) {
  using detail::fmt3;
  const double half = opt.size / 2.0, scale = opt.size / 2.2;
  auto X = [&](Point2 p) { return fmt3(half + scale * p.x1); };
  auto Y = [&](Point2 p) { return fmt3(half - scale * p.x2); };
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.size) + "\" height=\"" +
       std::to_string(opt.size) + "\" viewBox=\"0 0 " + std::to_string(opt.size) + " " + std::to_string(opt.size) +
       "\">\n";
  s += "<title>" + detail::xml_escape(d.name) + "</title>\n";
  s += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"7\" markerHeight=\"7\" "
       "orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#444\"/></marker></defs>\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<circle cx=\"" + fmt3(half) + "\" cy=\"" + fmt3(half) + "\" r=\"" + fmt3(scale) +
       "\" fill=\"none\" stroke=\"#bbb\" stroke-dasharray=\"2 4\"/>\n";

  s += "<g id=\"curves\" fill=\"none\" stroke-width=\"2\">\n";
  for (std::size_t i = 0; i < d.curves.size(); ++i) {
    const auto& c = d.curves[i];
    s += std::string("<") + (c.curve.closed ? "polygon" : "polyline") + " data-id=\"" + detail::xml_escape(c.id) +
         "\" stroke=\"" + detail::curve_colour(c.id, i) + "\" points=\"";
    for (std::size_t k = 0; k < c.curve.vertices.size(); ++k)
      s += (k ? " " : "") + X(c.curve.vertices[k]) + "," + Y(c.curve.vertices[k]);
    s += "\"/>\n";
  }
  s += "</g>\n";

  auto midpoint = [&](const std::string& edge_id) -> std::optional<Point2> {
    const Edge* e = d.find_edge(edge_id);
    const NamedCurve* c = e ? d.find_curve(e->curve) : nullptr;
    if (!c || c->curve.segment_count() == 0) return std::nullopt;
    return edge_point(*e, c->curve, 0.5);
  };

  if (opt.labels) {
    s += "<g id=\"labels\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">\n";
    for (const auto& e : d.edges)
      if (auto m = midpoint(e.id))
        s += "<text x=\"" + X(*m) + "\" y=\"" + Y(*m) + "\" dy=\"-6\">" + (e.label == Label::over ? "o" : "u") +
             "</text>\n";
    s += "</g>\n";
  }

  s += "<g id=\"pairings\" stroke=\"#444\" stroke-dasharray=\"6 4\" fill=\"none\">\n";
  for (const auto& p : d.pairings) {
    const auto a = midpoint(p.over_edge), b = midpoint(p.under_edge);
    if (!a || !b) continue;
    s += "<line x1=\"" + X(*a) + "\" y1=\"" + Y(*a) + "\" x2=\"" + X(*b) + "\" y2=\"" + Y(*b) +
         "\" marker-end=\"url(#arrow)\"/>\n";
  }
  s += "</g>\n";

  s += "<g id=\"triple-vertices\" fill=\"black\">\n";
  for (const auto& tv : d.triple_vertices)
    if (const NamedCurve* c = d.find_curve(tv.incident[0].curve)) {
      const Point2 p = eval_curve_wrapped(c->curve, tv.incident[0].t);
      s += "<rect x=\"" + fmt3(half + scale * p.x1 - 3) + "\" y=\"" + fmt3(half - scale * p.x2 - 3) +
           "\" width=\"6\" height=\"6\"/>\n";
    }
  s += "</g>\n";

  auto chord = [&](Point2 a, Point2 b, const char* colour) {
    return "<line x1=\"" + X(a) + "\" y1=\"" + Y(a) + "\" x2=\"" + X(b) + "\" y2=\"" + Y(b) + "\" stroke=\"" +
           colour + "\" stroke-width=\"3\"/>\n";
  };
  auto dot = [&](Point2 a, const char* colour) {
    return "<circle cx=\"" + X(a) + "\" cy=\"" + Y(a) + "\" r=\"4\" fill=\"" + colour + "\"/>\n";
  };
  s += "<g id=\"cycles\">\n";
  for (const auto& c : four) {
    s += chord(c.p[0].at, c.p[1].at, "crimson") + chord(c.p[3].at, c.p[2].at, "crimson");
    for (const auto& p : c.p) s += dot(p.at, "crimson");
  }
  for (const auto& c : two) {
    s += chord(c.p[3].at, c.p[1].at, "darkgreen");
    for (const auto& p : c.p) s += dot(p.at, "darkgreen");
  }
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace knotmu
