#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "knotmu/conway.hpp"
#include "knotmu/projection.hpp"
#include "knotmu/quadrisecant.hpp"
#include "support.hpp"

using namespace knotmu;
using knotmu::testing::read_file;
using knotmu::testing::source_path;

namespace {

PolyKnot classical(const std::string& name) {
  return parse_knot(read_file(source_path("classical/" + name + ".knot")));
}

long long conway_c2(const std::string& name) {
  const long long a = c2_alexander(alexander_polynomial(parse_pd(read_file(source_path("classical/" + name + ".pd")))));
  const long long g = c2_gauss(parse_gauss(read_file(source_path("classical/" + name + ".gauss"))));
  EXPECT_EQ(a, g) << name;
  return a;
}

const std::vector<std::string>& classical_names() {
  static const std::vector<std::string> names{"unknot", "3_1", "4_1", "5_1", "5_2", "6_1"};
  return names;
}

Segment3 seg(Point3 a, Point3 b) { return {a, b - a, false}; }

// Segment of half-length 1 centred on c.
Segment3 through(Point3 c, Point3 dir) {
  const Point3 u = normalized(dir);
  return seg(c - u, c + u);
}

void check_quadrisecant(const PolyKnot& k, const Quadrisecant& q) {
  const Tolerance tol;
  const Point3 u = q.direction;
  EXPECT_NEAR(norm(u), 1.0, 1e-12);
  for (int i = 0; i < 4; ++i) {
    EXPECT_LE(norm(cross(q.hits[i] - q.point, u)), tol.eq_tol);
    if (i > 0) EXPECT_LT(q.knot_params[i - 1], q.knot_params[i]);
  }
  // Line order (3,1,4,2): p3 < p1 < p4 < p2.
  EXPECT_LT(q.line_params[2], q.line_params[0]);
  EXPECT_LT(q.line_params[0], q.line_params[3]);
  EXPECT_LT(q.line_params[3], q.line_params[1]);
  EXPECT_EQ(q.line_order, (std::array<int, 4>{3, 1, 4, 2}));
  EXPECT_EQ(q.pattern, "alternating");
  if (q.sign) EXPECT_EQ(sign_of_quadrisecant(k, q), *q.sign);
}

PolyKnot planar_polygon(int n) {
  PolyKnot k;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * std::numbers::pi * (i + 0.1) / n;
    k.vertices.push_back({std::cos(a), 0.7 * std::sin(a), 0});
  }
  return k;
}

}  // namespace

TEST(LineTransversals, RecoversConstructedAxis) {
  const std::array<Segment3, 4> segs{through({0, 0, 0}, {0, 1, 0.2}), through({1, 0, 0}, {0, 0.3, 1}),
                                     through({2.5, 0, 0}, {0.4, -1, 0.5}), through({4, 0, 0}, {0.1, 0.8, -0.6})};
  const auto lines = line_transversals(segs);
  bool found = false;
  for (const auto& t : lines) {
    const bool along_axis = norm(cross(t.direction, {1, 0, 0})) < 1e-9 && std::hypot(t.point.y, t.point.z) < 1e-9;
    found = found || along_axis;
    if (along_axis)
      for (int i = 0; i < 4; ++i) EXPECT_NEAR(t.hits[i].s, 0.5, 1e-9);
  }
  EXPECT_TRUE(found);
}

TEST(LineTransversals, ParallelSegmentsHaveNone) {
  const Point3 d{0.2, 0.1, 1};
  const std::array<Segment3, 4> segs{through({0, 0, 0}, d), through({1, 0.3, 0}, d), through({0.2, 1.1, 0}, d),
                                     through({-0.7, 0.6, 0}, d)};
  EXPECT_TRUE(line_transversals(segs).empty());
  const std::array<Segment3, 4> flat{through({0, 0, 0}, d), through({1, 0, 0}, d), through({2, 0, 0}, d),
                                     through({3, 0, 0}, d)};
  EXPECT_THROW(line_transversals(flat), DegenerateConfiguration);
}

TEST(LineTransversals, CoincidentLinesAreDegenerate) {
  const std::array<Segment3, 4> segs{seg({0, 0, 0}, {1, 0, 0}), seg({2, 0, 0}, {3, 0, 0}),
                                     through({0, 1, 1}, {0, 1, 0}), through({1, -1, 2}, {0, 0, 1})};
  EXPECT_THROW(line_transversals(segs), DegenerateConfiguration);
}

TEST(LineTransversals, RandomSegmentsHaveSmallResiduals) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  auto pt = [&] { return Point3{u(rng), u(rng), u(rng)}; };
  int lines = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const std::array<Segment3, 4> segs{seg(pt(), pt()), seg(pt(), pt()), seg(pt(), pt()), seg(pt(), pt())};
    for (const auto& t : line_transversals(segs)) {
      ++lines;
      for (const auto& h : t.hits) {
        EXPECT_LE(h.residual, Tolerance{}.eq_tol);
        // Independent re-check: distance from the hit to the line.
        EXPECT_LE(norm(cross(h.at - t.point, t.direction)), Tolerance{}.eq_tol);
        EXPECT_GE(h.s, -Tolerance{}.endpoint_tol);
        EXPECT_LE(h.s, 1 + Tolerance{}.endpoint_tol);
      }
    }
  }
  EXPECT_GT(lines, 10);
}

TEST(KnotFormat, ParseSerializeValidate) {
  const PolyKnot k = parse_knot("# square-ish\nclosed\n0 0 0\n1 0 0.1\n1 1 0\n0 1 0.1\n");
  EXPECT_FALSE(k.long_knot);
  ASSERT_EQ(k.vertices.size(), 4u);
  EXPECT_NO_THROW(validate_knot(k));
  const PolyKnot back = parse_knot(serialize_knot(k));
  EXPECT_EQ(back.vertices, k.vertices);
  EXPECT_TRUE(parse_knot("0 0 0\n1 0 0\n").vertices.size() == 2);
  EXPECT_THROW(parse_knot("0 0\n"), ParseError);
  EXPECT_THROW(parse_knot("0 0 0 0\n"), ParseError);
  EXPECT_THROW(parse_knot("0 0 0\nlong\n"), ParseError);
  EXPECT_THROW(parse_knot("0 0 nan\n"), ParseError);
}

TEST(KnotFormat, ValidationFailures) {
  EXPECT_THROW(validate_knot(parse_knot("0 0 0\n1 0 0\n1 1 0\n")), StructuralError);
  // Bow tie: segments 0 and 2 cross.
  EXPECT_THROW(validate_knot(parse_knot("0 0 0\n1 1 0\n1 0 0\n0 1 0\n")), StructuralError);
  EXPECT_THROW(validate_knot(parse_knot("0 0 0\n0 0 0\n1 1 0\n0 1 0\n")), StructuralError);
  EXPECT_THROW(validate_knot(parse_knot("long\n0 0.5 0\n1 1 0\n2 -1 0\n3 0 0\n")), StructuralError);
  EXPECT_THROW(validate_knot(parse_knot("long\n0 0 0\n-1 1 0\n2 -1 0\n3 0 0\n")), StructuralError);
  EXPECT_NO_THROW(validate_knot(parse_knot("long\n0 0 0\n1 1 0\n2 -1 1\n3 0 0\n")));
}

TEST(ToLong, OpensAtLargestX1) {
  for (const auto& name : classical_names()) {
    const PolyKnot k = classical(name);
    const PolyKnot l = to_long(k);
    EXPECT_TRUE(l.long_knot);
    EXPECT_NO_THROW(validate_knot(l)) << name;
    EXPECT_EQ(l.vertices.size(), k.vertices.size() + 7);
  }
}

TEST(AlternatingQuadrisecants, PlanarConvexPolygonHasNone) {
  const QuadResult r = alternating_quadrisecants(planar_polygon(10));
  EXPECT_TRUE(r.quadrisecants.empty());
  EXPECT_EQ(r.total, 0);
}

TEST(AlternatingQuadrisecants, ShippedTotalsEqualC2) {
  for (const auto& name : classical_names()) {
    const PolyKnot k = classical(name);
    const QuadResult r = alternating_quadrisecants(k);
    EXPECT_EQ(r.total, conway_c2(name)) << name;
    EXPECT_EQ(r.parity, static_cast<int>(((conway_c2(name) % 2) + 2) % 2)) << name;
    EXPECT_TRUE(r.retries.empty()) << name;
    for (const auto& q : r.quadrisecants) check_quadrisecant(k, q);
  }
  EXPECT_EQ(alternating_quadrisecants(classical("3_1")).total, 1);
  const QuadResult fig8 = alternating_quadrisecants(classical("4_1"));
  EXPECT_EQ(fig8.total, -1);
  EXPECT_EQ(fig8.parity, 1);
}

TEST(AlternatingQuadrisecants, UnsignedCountKeepsParity) {
  QuadOptions opt;
  opt.compute_signs = false;
  for (const auto& name : {"3_1", "4_1"}) {
    const QuadResult r = alternating_quadrisecants(classical(name), {}, opt);
    EXPECT_FALSE(r.signed_count);
    EXPECT_EQ(r.total, 0);
    EXPECT_EQ(r.parity, alternating_quadrisecants(classical(name)).parity);
    for (const auto& q : r.quadrisecants) EXPECT_FALSE(q.sign.has_value());
  }
}

TEST(AlternatingQuadrisecants, ClosedAndOpenedInputAgree) {
  const PolyKnot k = classical("4_1");
  EXPECT_EQ(alternating_quadrisecants(k).total, alternating_quadrisecants(to_long(k)).total);
}

TEST(AlternatingQuadrisecants, MirrorTrefoil) {
  PolyKnot k = classical("3_1");
  for (auto& p : k.vertices) p.z = -p.z;
  EXPECT_EQ(c2_gauss(gauss_from_knot(k)), 1);
  EXPECT_EQ(alternating_quadrisecants(k).total, 1);
}

TEST(AlternatingQuadrisecants, RigidMotionInvariance) {
  const double c = std::cos(0.7), s = std::sin(0.7);
  const double rot[3][3] = {{c, -s, 0}, {s * 0.6, c * 0.6, -0.8}, {s * 0.8, c * 0.8, 0.6}};
  for (const auto& name : {"3_1", "4_1", "5_2"}) {
    const PolyKnot k = transform_knot(classical(name), rot, {0.3, -0.2, 1.1});
    EXPECT_EQ(alternating_quadrisecants(k).total, conway_c2(name)) << name;
  }
}

TEST(AlternatingQuadrisecants, PerturbationInvariance) {
  for (const auto& name : classical_names()) {
    const PolyKnot k = classical(name);
    const int total = alternating_quadrisecants(k).total;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
      EXPECT_EQ(alternating_quadrisecants(perturb_knot(k, seed, 1e-4)).total, total) << name << " seed " << seed;
  }
}

TEST(AlternatingQuadrisecants, RetriesAndGivesUp) {
  const PolyKnot k = planar_polygon(10);
  const QuadResult r = alternating_quadrisecants(k);
  EXPECT_FALSE(r.retries.empty());
  EXPECT_FALSE(r.degeneracies.empty());
  EXPECT_EQ(r.retries.front().seed, 1u);
  QuadOptions none;
  none.max_retries = 0;
  try {
    alternating_quadrisecants(k, {}, none);
    ADD_FAILURE() << "expected UnresolvedQuadDegeneracy";
  } catch (const UnresolvedQuadDegeneracy& e) {
    EXPECT_FALSE(e.events.empty());
  }
}

TEST(KnotConnect, StraightFactorIsUnit) {
  const PolyKnot straight = parse_knot("long\n-5 0 0\n5 0 0\n");
  const PolyKnot k = to_long(classical("3_1"));
  const PolyKnot c = knot_connect(straight, k);
  ASSERT_EQ(c.vertices.size(), k.vertices.size());
  const double dx = c.vertices[0].x - k.vertices[0].x;
  EXPECT_DOUBLE_EQ(c.vertices[0].x, -5.0);
  for (std::size_t i = 0; i < k.vertices.size(); ++i) EXPECT_EQ(c.vertices[i], (k.vertices[i] + Point3{dx, 0, 0}));
  EXPECT_EQ(knot_connect(k, straight).vertices, k.vertices);
  EXPECT_THROW(knot_connect(classical("3_1"), k), DomainError);
}

TEST(KnotConnect, SignedTotalIsAdditive) {
  const PolyKnot t = to_long(classical("3_1")), f = to_long(classical("4_1"));
  const QuadResult tt = alternating_quadrisecants(knot_connect(t, t));
  EXPECT_EQ(tt.total, 2);
  EXPECT_EQ(tt.parity, 0);
  const QuadResult tf = alternating_quadrisecants(knot_connect(t, f));
  EXPECT_EQ(tf.total, 0);
  EXPECT_EQ(tf.parity, 0);
}
