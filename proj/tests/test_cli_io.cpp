#include <gtest/gtest.h>

#include <regex>

#include "knotmu/render.hpp"
#include "knotmu/report.hpp"
#include "support.hpp"

using namespace knotmu;
using knotmu::testing::read_file;
using knotmu::testing::shipped;
using knotmu::testing::source_path;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

RunReport mu_report(const std::string& name) {
  const std::string path = source_path("knots/" + name + ".diagram");
  RunReport rep;
  rep.command = "mu2";
  rep.file = "knots/" + name + ".diagram";
  rep.hash = content_hash(read_file(path));
  const MuResult r = mu2(shipped(name));
  rep.parity = r.mu;
  rep.result = mu_result_json(r);
  return rep;
}

}  // namespace

TEST(Render, EmptyDiagramIsAValidCanvas) {
  const std::string svg = render_svg(shipped("0_1"));
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("<svg xmlns=\"http://www.w3.org/2000/svg\""), std::string::npos);
  EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
  EXPECT_EQ(count(svg, "<polygon"), 0u);
  EXPECT_EQ(count(svg, "marker-end"), 0u);
  EXPECT_EQ(count(svg, "<svg"), count(svg, "</svg>"));
  EXPECT_EQ(count(svg, "<g "), count(svg, "</g>"));
}

TEST(Render, TenOneIsEightCirclesWithFourArrows) {
  const DeckerDiagram d = shipped("10_1");
  const std::string svg = render_svg(d);
  EXPECT_EQ(count(svg, "<polygon"), 8u);
  EXPECT_EQ(count(svg, "marker-end=\"url(#arrow)\""), 4u);
  EXPECT_EQ(count(svg, ">o</text>"), 4u);
  EXPECT_EQ(count(svg, ">u</text>"), 4u);
}

TEST(Render, TenTwoMarksOneChordPair) {
  const DeckerDiagram d = shipped("10_2");
  const MuResult r = mu2(d);
  ASSERT_EQ(r.four_cycles.size(), 1u);
  const std::string svg = render_svg(d, r.four_cycles, r.two_cycles);
  EXPECT_EQ(count(svg, "stroke=\"crimson\""), 2u);
  EXPECT_EQ(count(svg, "fill=\"crimson\""), 4u);
  // Both chords are vertical.
  const std::regex line("<line x1=\"([0-9.]+)\" y1=\"[0-9.]+\" x2=\"([0-9.]+)\" y2=\"[0-9.]+\" stroke=\"crimson\"");
  int seen = 0;
  for (std::sregex_iterator it(svg.begin(), svg.end(), line), end; it != end; ++it, ++seen)
    EXPECT_EQ((*it)[1].str(), (*it)[2].str());
  EXPECT_EQ(seen, 2);
}

TEST(Render, ColoursFollowCurveIds) {
  const std::string svg = render_svg(shipped("10_2"));
  EXPECT_NE(svg.find("data-id=\"orange\" stroke=\"orange\""), std::string::npos);
  EXPECT_NE(svg.find("data-id=\"blue\" stroke=\"blue\""), std::string::npos);
  EXPECT_EQ(detail::curve_colour("C1", 0), "#1f77b4");
  EXPECT_EQ(detail::xml_escape("a<b&\"c\""), "a&lt;b&amp;&quot;c&quot;");
}

TEST(Render, IsDeterministic) {
  for (const auto& name : knotmu::testing::corpus_names()) EXPECT_EQ(render_svg(shipped(name)), render_svg(shipped(name)));
}

TEST(RunReport, RoundTrips) {
  for (const auto& name : knotmu::testing::corpus_names()) {
    RunReport rep = mu_report(name);
    const nlohmann::json j = rep.to_json();
    const RunReport back = RunReport::from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.to_json(), j) << name;
    EXPECT_EQ(back.parity, rep.parity);
    EXPECT_EQ(back.hash, rep.hash);
  }
}

TEST(RunReport, ParityOnlyOnSuccess) {
  RunReport ok = mu_report("10_2");
  EXPECT_EQ(ok.to_json().at("parity"), 1);
  EXPECT_FALSE(ok.to_json().contains("error"));
  RunReport failed;
  failed.command = "mu2";
  failed.error = "unresolved degeneracy";
  const nlohmann::json j = failed.to_json();
  EXPECT_FALSE(j.contains("parity"));
  EXPECT_FALSE(RunReport::from_json(j).parity.has_value());
  EXPECT_THROW(RunReport::from_json(nlohmann::json::object()), ParseError);
}

TEST(RunReport, RepeatedRunsAreByteIdentical) {
  for (const auto& name : knotmu::testing::corpus_names())
    EXPECT_EQ(mu_report(name).to_json().dump(2), mu_report(name).to_json().dump(2)) << name;
}

TEST(RunReport, HashTracksContent) {
  EXPECT_EQ(content_hash(""), "fnv1a64:cbf29ce484222325");
  EXPECT_NE(content_hash("a"), content_hash("b"));
  EXPECT_EQ(mu_report("8_1").hash, content_hash(read_file(source_path("knots/8_1.diagram"))));
}

TEST(RunReport, QuadrisecantTotals) {
  const PolyKnot k = parse_knot(read_file(source_path("classical/3_1.knot")));
  const nlohmann::json j = quad_result_json(alternating_quadrisecants(k));
  EXPECT_EQ(j.at("total"), 1);
  EXPECT_EQ(j.at("parity"), 1);
  EXPECT_EQ(j.at("quadrisecants").size(), j.at("count").get<std::size_t>());
  QuadOptions unsigned_only;
  unsigned_only.compute_signs = false;
  EXPECT_FALSE(quad_result_json(alternating_quadrisecants(k, {}, unsigned_only)).contains("total"));
}
