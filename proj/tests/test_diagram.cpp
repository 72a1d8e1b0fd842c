#include <gtest/gtest.h>

#include <random>

#include "knotmu/diagram.hpp"
#include "support.hpp"

using namespace knotmu;
using knotmu::testing::shipped;

namespace {

DeckerDiagram two_circles(Orientation o) {
  DeckerDiagram d;
  d.name = "pair";
  d.curves.push_back(knotmu::testing::polygon_circle("P", {-0.4, 0}, 0.3, 0, 16));
  d.curves.push_back(knotmu::testing::polygon_circle("Q", {0.4, 0}, 0.3, 0, 16));
  d.edges.push_back({"P0", "P", 0.0, 0.5, Label::over});
  d.edges.push_back({"P1", "P", 0.5, 1.0, Label::under});
  d.edges.push_back({"Q0", "Q", 0.0, 0.5, Label::under});
  d.edges.push_back({"Q1", "Q", 0.5, 1.0, Label::over});
  d.pairings.push_back({"P0", "Q0", o});
  d.pairings.push_back({"Q1", "P1", o});
  return d;
}

std::string message_of(const std::string& text) {
  try {
    parse_diagram(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(ParseDiagram, EmptyDiagram) {
  const DeckerDiagram d = shipped("0_1");
  EXPECT_EQ(d.name, "0_1");
  EXPECT_TRUE(d.curves.empty());
  EXPECT_TRUE(d.edges.empty());
}

TEST(ParseDiagram, EightOneHasThreePairings) {
  const DeckerDiagram d = shipped("8_1");
  ASSERT_EQ(d.curves.size(), 6u);
  EXPECT_EQ(d.edges.size(), 6u);
  ASSERT_EQ(d.pairings.size(), 3u);
  const std::pair<const char*, const char*> expected[] = {{"D", "A"}, {"B", "E"}, {"F", "C"}};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(d.pairings[i].over_edge, expected[i].first);
    EXPECT_EQ(d.pairings[i].under_edge, expected[i].second);
  }
}

TEST(ParseDiagram, ErrorsNameTheLocation) {
  EXPECT_NE(message_of(R"({"name":"x","curves":[],"edges":[{"id":"e","curve":"nope","t0":0,"t1":1,"label":"over"}],
                        "pairings":[],"triple_vertices":[]})")
                .find("'nope'"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"name":"x","colour":1})").find("unknown key 'colour'"), std::string::npos);
  EXPECT_NE(message_of(R"({"name":"x",)").find("syntax error"), std::string::npos);
  EXPECT_NE(message_of(R"({"name":"x","curves":[{"id":"a","closed":true,"vertices":[[0,0],[1]]}]})")
                .find("curves[0].vertices[1]"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"name":"x","curves":[{"id":"a","closed":true,"vertices":[]},
                                                {"id":"a","closed":true,"vertices":[]}]})")
                .find("duplicate curve id"),
            std::string::npos);
}

TEST(ParseDiagram, RoundTripsShippedCorpus) {
  for (const auto& name : knotmu::testing::corpus_names()) {
    const DeckerDiagram d = shipped(name);
    const std::string once = serialize_diagram(d);
    const DeckerDiagram back = parse_diagram(once);
    EXPECT_EQ(serialize_diagram(back), once) << name;
    ASSERT_EQ(back.curves.size(), d.curves.size());
    for (std::size_t i = 0; i < d.curves.size(); ++i) EXPECT_EQ(back.curves[i].curve.vertices, d.curves[i].curve.vertices);
    EXPECT_EQ(back.note, d.note);
  }
}

TEST(Validate, ShippedCorpusIsValid) {
  for (const auto& name : knotmu::testing::corpus_names()) {
    const ValidationReport r = validate(shipped(name));
    EXPECT_TRUE(r.valid()) << name << ": " << (r.valid() ? "" : r.violations.front().message);
  }
}

TEST(Validate, FlippedLabelBreaksComplementarity) {
  DeckerDiagram d = shipped("10_2");
  d.edges.front().label = d.edges.front().label == Label::over ? Label::under : Label::over;
  EXPECT_TRUE(validate(d).has(ViolationKind::label_complementarity));
}

TEST(Validate, DetectsEachViolationKind) {
  DeckerDiagram out = two_circles(Orientation::preserving);
  ASSERT_TRUE(validate(out).valid());
  for (auto& v : out.curves[0].curve.vertices) v.x1 -= 0.5;
  EXPECT_TRUE(validate(out).has(ViolationKind::outside_disk));

  DeckerDiagram bow = two_circles(Orientation::preserving);
  bow.curves[0].curve.vertices = {{-0.6, -0.2}, {-0.2, 0.2}, {-0.2, -0.2}, {-0.6, 0.2}};
  EXPECT_TRUE(validate(bow).has(ViolationKind::self_intersection));

  DeckerDiagram gap = two_circles(Orientation::preserving);
  gap.edges[1].t1 = 0.9;
  EXPECT_TRUE(validate(gap).has(ViolationKind::edge_partition));

  DeckerDiagram lonely = two_circles(Orientation::preserving);
  lonely.pairings.pop_back();
  EXPECT_TRUE(validate(lonely).has(ViolationKind::unpaired_edge));

  DeckerDiagram dangling = two_circles(Orientation::preserving);
  dangling.pairings[0].under_edge = "ghost";
  EXPECT_TRUE(validate(dangling).has(ViolationKind::dangling_reference));

  DeckerDiagram tv = shipped("10_2");
  tv.triple_vertices[0].incident[1].t = 0.5 / 6;
  EXPECT_TRUE(validate(tv).has(ViolationKind::triple_vertex));
}

TEST(Tau, EndpointsAndMidpoints) {
  const DeckerDiagram pres = two_circles(Orientation::preserving);
  const DeckerDiagram rev = two_circles(Orientation::reversing);
  EXPECT_NEAR(tau(pres, {"P0", 0.0}).t, 0.0, 1e-12);
  EXPECT_EQ(tau(pres, {"P0", 0.0}).edge, "Q0");
  EXPECT_NEAR(tau(rev, {"P0", 0.0}).t, 0.5, 1e-12);
  EXPECT_NEAR(tau(pres, {"P0", 0.25}).t, 0.25, 1e-12);
  EXPECT_NEAR(tau(rev, {"P0", 0.25}).t, 0.25, 1e-12);
  EXPECT_NEAR(tau(rev, {"Q1", 0.6}).t, 0.9, 1e-12);
}

TEST(Tau, RejectsUnpairedAndOffEdgePoints) {
  DeckerDiagram d = two_circles(Orientation::preserving);
  d.pairings.pop_back();
  EXPECT_THROW(tau(d, {"Q1", 0.75}), StructuralError);
  EXPECT_THROW(tau(d, {"P0", 0.75}), DomainError);
}

TEST(Tau, IsAnInvolutionOnShippedEdges) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0, 1);
  for (const auto& name : knotmu::testing::corpus_names()) {
    const DeckerDiagram d = shipped(name);
    if (d.edges.empty()) continue;
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      const Edge& e = d.edges[rng() % d.edges.size()];
      const PLCurve& c = d.find_curve(e.curve)->curve;
      const EdgePoint p{e.id, edge_param(e, c, uni(rng))};
      const EdgePoint back = tau(d, tau(d, p));
      ASSERT_EQ(back.edge, p.edge);
      worst = std::max(worst, distance(eval_curve_wrapped(c, back.t), eval_curve_wrapped(c, p.t)));
    }
    EXPECT_LE(worst, Tolerance{}.eq_tol) << name;
  }
}

TEST(StripUnion, EmptyLeftIsRescaledRight) {
  const DeckerDiagram d = shipped("8_1");
  const DeckerDiagram u = strip_union(shipped("0_1"), d);
  ASSERT_EQ(u.curves.size(), d.curves.size());
  for (std::size_t i = 0; i < d.curves.size(); ++i) {
    EXPECT_EQ(u.curves[i].id, "b." + d.curves[i].id);
    const Point2 expect = 0.49 * d.curves[i].curve.vertices[0] + Point2{0.5, 0};
    EXPECT_NEAR(distance(u.curves[i].curve.vertices[0], expect), 0, 1e-15);
  }
  EXPECT_TRUE(validate(u).valid());
}

TEST(StripUnion, HalvesAreSeparated) {
  const Tolerance tol;
  for (const auto& a : knotmu::testing::corpus_names())
    for (const auto& b : knotmu::testing::corpus_names()) {
      const DeckerDiagram u = strip_union(shipped(a), shipped(b));
      double left_max = -2, right_min = 2;
      for (const auto& c : u.curves)
        for (const auto& v : c.curve.vertices) {
          if (c.id.starts_with("a.")) left_max = std::max(left_max, v.x1);
          else right_min = std::min(right_min, v.x1);
        }
      EXPECT_LT(left_max, -tol.sep_tol);
      EXPECT_GT(right_min, tol.sep_tol);
      EXPECT_GE(right_min - left_max, 2 * tol.sep_tol);
      EXPECT_TRUE(validate(u).valid()) << a << "#" << b;
    }
}

TEST(Perturb, ZeroIsIdentityAndSeedsAreDeterministic) {
  const DeckerDiagram d = shipped("10_2");
  EXPECT_EQ(serialize_diagram(perturb_diagram(d, 5, 0.0)), serialize_diagram(d));
  EXPECT_EQ(serialize_diagram(perturb_diagram(d, 5, 1e-3)), serialize_diagram(perturb_diagram(d, 5, 1e-3)));
  EXPECT_NE(serialize_diagram(perturb_diagram(d, 5, 1e-3)), serialize_diagram(perturb_diagram(d, 6, 1e-3)));
  EXPECT_THROW(perturb_diagram(d, 1, -1e-3), DomainError);
}

TEST(Perturb, OffsetsAreBoundedAndStructureKept) {
  for (const auto& name : knotmu::testing::corpus_names()) {
    const DeckerDiagram d = shipped(name);
    const DeckerDiagram p = perturb_diagram(d, 42, 1e-3);
    ASSERT_EQ(p.curves.size(), d.curves.size());
    for (std::size_t c = 0; c < d.curves.size(); ++c)
      for (std::size_t v = 0; v < d.curves[c].curve.vertices.size(); ++v) {
        EXPECT_LE(distance(p.curves[c].curve.vertices[v], d.curves[c].curve.vertices[v]), 1e-3 + 1e-15);
        EXPECT_LE(norm(p.curves[c].curve.vertices[v]), 1.0);
      }
    ASSERT_EQ(p.edges.size(), d.edges.size());
    for (std::size_t e = 0; e < d.edges.size(); ++e) {
      EXPECT_EQ(p.edges[e].t0, d.edges[e].t0);
      EXPECT_EQ(p.edges[e].label, d.edges[e].label);
    }
    EXPECT_TRUE(validate(p).valid()) << name;
  }
}

TEST(Perturb, SharedTriplePointVerticesMoveTogether) {
  const DeckerDiagram d = shipped("10_2");
  const DeckerDiagram p = perturb_diagram(d, 9, 2e-3);
  for (const auto& a : d.curves)
    for (const auto& b : d.curves) {
      if (a.id >= b.id) continue;
      const auto& pa = p.find_curve(a.id)->curve.vertices;
      const auto& pb = p.find_curve(b.id)->curve.vertices;
      for (std::size_t i = 0; i < a.curve.vertices.size(); ++i)
        for (std::size_t j = 0; j < b.curve.vertices.size(); ++j)
          if (distance(a.curve.vertices[i], b.curve.vertices[j]) <= 1e-6) EXPECT_LE(distance(pa[i], pb[j]), 1e-6);
    }
}

TEST(Resample, KeepsPlanarPointsOfEdgeEnds) {
  for (const auto& name : knotmu::testing::corpus_names()) {
    const DeckerDiagram d = shipped(name);
    for (double skew : {0.0, 0.4}) {
      const DeckerDiagram r = resample_diagram(d, 2, skew);
      for (std::size_t c = 0; c < d.curves.size(); ++c)
        EXPECT_EQ(r.curves[c].curve.vertices.size(), 2 * d.curves[c].curve.vertices.size());
      for (std::size_t e = 0; e < d.edges.size(); ++e) {
        const PLCurve& c0 = d.find_curve(d.edges[e].curve)->curve;
        const PLCurve& c1 = r.find_curve(r.edges[e].curve)->curve;
        EXPECT_LE(distance(eval_curve_wrapped(c0, d.edges[e].t0), eval_curve_wrapped(c1, r.edges[e].t0)), 1e-12);
      }
      EXPECT_TRUE(validate(r).valid()) << name;
    }
  }
}
