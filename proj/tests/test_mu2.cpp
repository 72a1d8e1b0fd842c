#include <gtest/gtest.h>

#include <map>
#include <set>

#include "knotmu/mu2.hpp"
#include "support.hpp"

using namespace knotmu;
using knotmu::testing::shipped;

namespace {

void expect_tau(const DeckerDiagram& d, const CyclePoint& from, const CyclePoint& to) {
  const EdgePoint img = tau(d, {from.edge, from.t});
  EXPECT_EQ(img.edge, to.edge);
  const PLCurve& c = d.find_curve(to.curve)->curve;
  EXPECT_LE(distance(eval_curve_wrapped(c, img.t), to.at), 1e-9);
}

bool over(const DeckerDiagram& d, const CyclePoint& p) { return d.find_edge(p.edge)->label == Label::over; }

void check_certificate(const DeckerDiagram& d, const MuResult& r) {
  const Tolerance tol;
  for (const FourCycle& c : r.four_cycles) {
    const auto& p = c.p;
    EXPECT_TRUE(over(d, p[0]) && over(d, p[3]));
    expect_tau(d, p[0], p[2]);
    expect_tau(d, p[3], p[1]);
    EXPECT_LE(std::abs(p[1].at.x1 - p[0].at.x1), tol.eq_tol);
    EXPECT_LE(std::abs(p[2].at.x1 - p[3].at.x1), tol.eq_tol);
    EXPECT_GT(p[1].at.x2, p[0].at.x2 + tol.sep_tol);
    EXPECT_GT(p[2].at.x2, p[3].at.x2 + tol.sep_tol);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) EXPECT_GE(distance(p[i].at, p[j].at), tol.sep_tol);
  }
  for (const TwoCycle& c : r.two_cycles) {
    const auto& p = c.p;
    EXPECT_TRUE(over(d, p[3]));
    EXPECT_FALSE(over(d, p[2]));
    expect_tau(d, p[3], p[1]);
    expect_tau(d, p[2], p[0]);
    EXPECT_LE(std::abs(p[1].at.x1 - p[3].at.x1), tol.eq_tol);
    EXPECT_LE(std::abs(p[2].at.x1 - p[3].at.x1), tol.eq_tol);
    EXPECT_GT(p[2].at.x2, p[3].at.x2 + tol.sep_tol);
    EXPECT_LT(p[2].at.x2, p[1].at.x2 - tol.sep_tol);
  }
  EXPECT_EQ(r.mu, (r.n4 + r.n2) % 2);
  EXPECT_EQ(r.raw_four, 2 * static_cast<std::size_t>(r.n4));
}

DeckerDiagram with_vertical_segment() {
  DeckerDiagram d;
  d.name = "boxes";
  d.curves.push_back({"S", {{{-0.6, -0.2}, {-0.2, -0.2}, {-0.2, 0.2}, {-0.6, 0.25}}, true}});
  d.curves.push_back(knotmu::testing::polygon_circle("T", {0.4, 0.1}, 0.2, 0.1, 20));
  d.edges.push_back({"S", "S", 0.0, 1.0, Label::over});
  d.edges.push_back({"T", "T", 0.0, 1.0, Label::under});
  d.pairings.push_back({"S", "T", Orientation::preserving});
  return d;
}

}  // namespace

TEST(Mu2, EmptyDiagramIsZero) {
  const MuResult r = mu2(shipped("0_1"));
  EXPECT_EQ(r.mu, 0);
  EXPECT_EQ(r.n4, 0);
  EXPECT_EQ(r.n2, 0);
  EXPECT_TRUE(r.retries.empty());
}

TEST(Mu2, ShippedValues) {
  const std::map<std::string, std::pair<int, int>> counts{
      {"8_1", {1, 3}}, {"9_1", {2, 0}}, {"10_1", {6, 6}}, {"10_2", {1, 0}}, {"10_3", {0, 0}}};
  const std::map<std::string, int> parity{{"8_1", 0}, {"9_1", 0}, {"10_1", 0}, {"10_2", 1}, {"10_3", 0}};
  for (const auto& [name, nn] : counts) {
    const DeckerDiagram d = shipped(name);
    const MuResult r = mu2(d);
    EXPECT_EQ(r.mu, parity.at(name)) << name;
    EXPECT_EQ(r.n4, nn.first) << name;
    EXPECT_EQ(r.n2, nn.second) << name;
    EXPECT_TRUE(r.degeneracies.empty()) << name;
    check_certificate(d, r);
  }
}

TEST(FindFourCycles, TenTwoOrbitUsesThreeColours) {
  const auto cycles = find_four_cycles(shipped("10_2"));
  ASSERT_EQ(cycles.size(), 1u);
  std::set<std::string> curves;
  for (const auto& p : cycles[0].p) curves.insert(p.curve);
  EXPECT_EQ(curves, (std::set<std::string>{"blue", "orange", "purple"}));
}

TEST(FindFourCycles, OrbitIdIsCanonical) {
  for (const auto& name : knotmu::testing::corpus_names())
    for (const FourCycle& c : find_four_cycles(shipped(name))) {
      const std::string id = c.p[0].edge + "@" + detail::fixed9(c.p[0].phi) + "|" + c.p[3].edge + "@" +
                             detail::fixed9(c.p[3].phi);
      EXPECT_EQ(c.orbit_id, id);
    }
}

TEST(FindCycles, DisjointColumnsGiveNothing) {
  const DeckerDiagram d = shipped("10_3");
  EXPECT_TRUE(find_four_cycles(d).empty());
  EXPECT_TRUE(find_two_cycles(d).empty());
  EXPECT_TRUE(find_two_cycles(shipped("0_1")).empty());
}

TEST(FindTwoCycles, TenTwoHasNone) { EXPECT_TRUE(find_two_cycles(shipped("10_2")).empty()); }

TEST(FindTwoCycles, EightOneHasThree) { EXPECT_EQ(find_two_cycles(shipped("8_1")).size(), 3u); }

TEST(Mu2, RetriesVerticalSegments) {
  const DeckerDiagram d = with_vertical_segment();
  ASSERT_FALSE(vertical_segment_events(d).empty());
  EXPECT_EQ(vertical_segment_events(d).front().pattern, DegeneracyPattern::vertical_segment);
  const MuResult r = mu2(d);
  EXPECT_FALSE(r.retries.empty());
  EXPECT_FALSE(r.degeneracies.empty());
  EXPECT_EQ(r.retries.front().seed, 1u);
  EXPECT_DOUBLE_EQ(r.retries.front().magnitude, 10 * Tolerance{}.endpoint_tol);

  MuOptions none;
  none.max_retries = 0;
  try {
    mu2(d, {}, none);
    ADD_FAILURE() << "expected UnresolvedDegeneracy";
  } catch (const UnresolvedDegeneracy& e) {
    EXPECT_FALSE(e.events.empty());
  }
}

TEST(StableMu2, EmptyIsUnanimousZero) {
  const MuResult r = stable_mu2(shipped("0_1"), 3);
  EXPECT_EQ(r.mu, 0);
  ASSERT_TRUE(r.vote.has_value());
  EXPECT_TRUE(r.vote->unanimous());
  EXPECT_EQ(r.vote->zeros, 3);
  EXPECT_THROW(stable_mu2(shipped("0_1"), 4), DomainError);
}

TEST(StableMu2, TenTwoIsUnanimous) {
  const MuResult r = stable_mu2(shipped("10_2"), 21);
  EXPECT_EQ(r.mu, 1);
  EXPECT_TRUE(r.vote->unanimous());
}

TEST(ClassifyDegeneracy, TripleVertexGivesPatternA) {
  const DeckerDiagram d = shipped("10_2");
  const TripleVertex& tv = d.triple_vertices[0];
  const NamedCurve* c = d.find_curve(tv.incident[0].curve);
  CyclePoint p{"K1.0", c->id, tv.incident[0].t, 0.0, eval_curve_wrapped(c->curve, tv.incident[0].t)};
  CyclePoint q = p;
  q.at.x2 += 0.3;
  const DegeneracyEvent ev = classify_degeneracy(d, {Trigger::boundary, {p, q}, "four-cycle"});
  EXPECT_EQ(ev.pattern, DegeneracyPattern::cd1vt_a);
  EXPECT_STREQ(to_string(ev.pattern), "cd1vt-a");
}

TEST(ClassifyDegeneracy, AlignedQuadrupleAndPlumbing) {
  const DeckerDiagram d = shipped("8_1");
  std::vector<CyclePoint> pts;
  for (int i = 0; i < 4; ++i) pts.push_back({"A", "A", 0.1 * i, 0.1 * i, {0.05, -0.3 + 0.2 * i}});
  EXPECT_EQ(classify_degeneracy(d, {Trigger::coincidence, pts, "four-cycle"}).pattern, DegeneracyPattern::cd1vt_f);
  pts.resize(2);
  EXPECT_EQ(classify_degeneracy(d, {Trigger::singular, pts, "four-cycle"}).pattern,
            DegeneracyPattern::singular_cell);
  EXPECT_EQ(classify_degeneracy(d, {Trigger::boundary, pts, "two-cycle"}).pattern, DegeneracyPattern::cell_boundary);
}

TEST(Mu2Invariance, ResamplingTranslationScaling) {
  for (const auto& name : knotmu::testing::corpus_names()) {
    const DeckerDiagram d = shipped(name);
    const int mu = mu2(d).mu;
    EXPECT_EQ(mu2(resample_diagram(d, 2)).mu, mu) << name;
    EXPECT_EQ(mu2(resample_diagram(d, 2, 0.5)).mu, mu) << name;
    EXPECT_EQ(mu2(transform_diagram(d, 0.7, {0.1, -0.05})).mu, mu) << name;
    EXPECT_EQ(mu2(transform_diagram(d, 0.5, {-0.3, 0.3})).mu, mu) << name;
  }
}

TEST(Mu2Invariance, Additivity) {
  const std::vector<std::string> names{"0_1", "8_1", "10_2"};
  for (const auto& a : names)
    for (const auto& b : names) {
      const DeckerDiagram da = shipped(a), db = shipped(b);
      EXPECT_EQ(mu2(strip_union(da, db)).mu, (mu2(da).mu + mu2(db).mu) % 2) << a << "#" << b;
    }
}

TEST(Mu2, RandomDiagramsSatisfyCertificates) {
  std::mt19937_64 rng(17);
  int clean = 0;
  for (int i = 0; i < 40; ++i) {
    const DeckerDiagram d = knotmu::testing::random_circle_diagram(rng);
    const MuResult r = mu2(d);
    if (r.retries.empty()) ++clean;
    check_certificate(r.retries.empty() ? d : perturb_diagram(d, r.retries.back().seed, r.retries.back().magnitude), r);
  }
  EXPECT_GT(clean, 20);
}
