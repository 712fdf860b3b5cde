#include <gepsoc/cone_union.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace gepsoc;

namespace {

ConvexCone H(std::size_t dim, std::vector<Vec> ineq, std::vector<Vec> eq = {}) {
  return ConvexCone::from_hrep(dim, ineq, eq);
}

bool same_rays(std::vector<Vec> a, std::vector<Vec> b) {
  for (auto& v : a) v = primitive(v);
  for (auto& v : b) v = primitive(v);
  std::sort(a.begin(), a.end(), lex_less);
  std::sort(b.begin(), b.end(), lex_less);
  return a == b;
}

// Brute-force extreme rays of a pointed cone {x : A x <= 0} in R^2: for each
// row, the two unit directions on its line that satisfy all rows.
std::vector<Vec> brute_rays_2d(const std::vector<Vec>& rows) {
  std::vector<Vec> out;
  for (const auto& a : rows) {
    for (int s : {1, -1}) {
      Vec r{-s * a[1], s * a[0]};
      bool ok = true;
      for (const auto& b : rows) ok = ok && sgn(dot(b, r)) <= 0;
      if (ok && std::find(out.begin(), out.end(), primitive(r)) == out.end()) out.push_back(primitive(r));
    }
  }
  return out;
}

ConvexCone random_cone(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_int_distribution<int> c(-2, 2);
  std::size_t k = std::uniform_int_distribution<std::size_t>(0, dim + 2)(rng);
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < k; ++i) {
    Vec a(dim);
    for (auto& x : a) x = c(rng);
    rows.push_back(a);
  }
  return H(dim, rows);
}

}  // namespace

TEST(Cone, DoubleDescriptionOfOrthantAndFullSpace) {
  auto o = H(2, {{1, 0}, {0, 1}});
  EXPECT_TRUE(same_rays(o.rays(), {{-1, 0}, {0, -1}}));
  EXPECT_TRUE(o.lineality().empty());
  auto f = ConvexCone::full(2);
  EXPECT_TRUE(f.rays().empty());
  EXPECT_EQ(Subspace(2, f.lineality()).dim(), 2u);
}

TEST(Cone, DoubleDescriptionMatchesBruteForceRays) {
  auto k = H(2, {{1, 1}, {-1, 0}});
  EXPECT_TRUE(same_rays(k.rays(), {{0, -1}, {1, -1}}));
  EXPECT_TRUE(same_rays(k.rays(), brute_rays_2d({{1, 1}, {-1, 0}})));
}

TEST(Cone, PolarExamples) {
  EXPECT_EQ(ConvexCone::nonpositive_orthant(2).polar(), ConvexCone::nonnegative_orthant(2));
  EXPECT_TRUE(ConvexCone::full(3).polar().is_zero());
  auto k = ConvexCone::from_vrep(2, {{0, -1}, {1, -1}});
  auto p = k.polar();
  EXPECT_TRUE(same_rays(p.rays(), {{1, 1}, {-1, 0}}));
  for (const auto& a : k.rays())
    for (const auto& b : p.rays()) EXPECT_LE(sgn(dot(a, b)), 0);
}

TEST(Cone, SpanAndLineality) {
  auto rm = H(1, {{1}});
  EXPECT_EQ(rm.span().dim(), 1u);
  EXPECT_EQ(rm.lineality_space().dim(), 0u);
  auto ray = ConvexCone::from_vrep(2, {{1, -1}});
  EXPECT_EQ(ray.span().dim(), 1u);
  EXPECT_TRUE(ray.span().contains({-2, 2}));
  auto half = H(3, {{1, 0, 0}});
  EXPECT_EQ(half.lineality_space(), Subspace(3, {{0, 1, 0}, {0, 0, 1}}));
}

TEST(Cone, TangentNormalCriticalOfPolyhedra) {
  auto p = nonpositive_orthant(2);
  EXPECT_EQ(p.tangent_at({0, -1}), H(2, {{1, 0}}));
  EXPECT_EQ(p.tangent_at({0, 0}), ConvexCone::nonpositive_orthant(2));
  EXPECT_EQ(p.normal_at({0, -1}), H(2, {{-1, 0}}, {{0, 1}}));
  EXPECT_TRUE(p.normal_at({-1, -1}).is_zero());
  EXPECT_EQ(nonpositive_orthant(1).normal_at({0}), ConvexCone::nonnegative_orthant(1));
  auto q = ConvexPolyhedron::from_hrep(2, {{{1, 1}, 0}, {{-1, 0}, 0}});
  EXPECT_EQ(q.tangent_at({0, 0}), H(2, {{1, 1}, {-1, 0}}));
  EXPECT_THROW(p.tangent_at({1, 0}), Error);
}

TEST(Cone, CriticalConeExamples) {
  auto r = nonpositive_orthant(1);
  EXPECT_EQ(r.critical_at({0}, {0}), ConvexCone::nonpositive_orthant(1));
  EXPECT_TRUE(r.critical_at({0}, {1}).is_zero());
  EXPECT_EQ(nonpositive_orthant(2).critical_at({0, -1}, {1, 0}), H(2, {}, {{1, 0}}));
  EXPECT_THROW(r.critical_at({0}, {-1}), Error);
}

TEST(Cone, TangentAgreesWithSampling) {
  // u is tangent to a polyhedron at d iff d + t u stays feasible for small t
  auto q = ConvexPolyhedron::from_hrep(2, {{{1, 1}, 0}, {{-1, 0}, 0}});
  auto t = q.tangent_at({0, 0});
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) EXPECT_EQ(t.contains({a, b}), q.contains({ratio(a, 1000), ratio(b, 1000)}));
}

TEST(Cone, FacesOfSmallCones) {
  EXPECT_EQ(ConvexCone::nonpositive_orthant(1).faces().size(), 2u);
  EXPECT_EQ(ConvexCone::nonpositive_orthant(2).faces().size(), 4u);
  EXPECT_EQ(ConvexCone::from_vrep(2, {{0, -1}, {1, -1}}).faces().size(), 4u);
}

TEST(Cone, MembershipAndUnionEquality) {
  EXPECT_TRUE(ConvexCone::nonpositive_orthant(2).contains({0, -5}));
  auto a = H(2, {{1, 0}}, {{0, 1}}), b = H(2, {{0, -1}}, {{1, 0}});
  EXPECT_TRUE(union_equal(ConeUnion(2, {a, b}), ConeUnion(2, {b, a})));
  auto zr = H(2, {}, {{1, 0}}), rz = H(2, {}, {{0, 1}}), pm = H(2, {{-1, 0}, {0, 1}});
  EXPECT_TRUE(union_equal(ConeUnion(2, {rz, zr, pm}), ConeUnion(2, {zr, rz, pm})));
  EXPECT_FALSE(union_equal(ConeUnion(2, {rz, zr}), ConeUnion(2, {zr, rz, pm})));
}

TEST(Cone, UnionCoverageNeedsSubdivision) {
  // the two half planes cover the plane although neither piece does
  ConeUnion halves(2, {H(2, {{1, 0}}), H(2, {{-1, 0}})});
  EXPECT_TRUE(union_equal(halves, ConeUnion(2, {ConvexCone::full(2)})));
  // three sectors leave a gap
  ConeUnion gap(2, {H(2, {{1, 0}}), H(2, {{-1, 0}, {0, 1}})});
  EXPECT_FALSE(gap.covers(ConvexCone::full(2)));
}

TEST(Cone, UnionTangentExamples) {
  auto a = H(2, {{1, 0}}, {{0, 1}}), b = H(2, {{0, -1}}, {{1, 0}});
  ConeUnion c(2, {a, b});
  EXPECT_TRUE(union_equal(union_tangent(c, {0, 0}), c));
  EXPECT_TRUE(union_equal(union_tangent(c, {0, 3}), ConeUnion(2, {H(2, {}, {{1, 0}})})));
  EXPECT_TRUE(union_equal(union_tangent(c, {-1, 0}), ConeUnion(2, {H(2, {}, {{0, 1}})})));
  EXPECT_THROW(union_tangent(c, {1, 1}), Error);
}

TEST(Cone, CanonicalUnionDropsContainedPieces) {
  ConeUnion u(2, {ConvexCone::nonpositive_orthant(2), H(2, {{1, 0}}), H(2, {}, {{1, 0}, {0, 1}})});
  EXPECT_EQ(u.size(), 1u);
}

TEST(ConeProperty, PolarIsAnInvolution) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 100; ++k) {
    auto c = random_cone(rng, 1 + k % 3);
    EXPECT_EQ(c.polar().polar(), c);
    // independent check: every generator pairs nonpositively with every polar generator
    for (const auto& r : c.rays())
      for (const auto& s : c.polar().rays()) EXPECT_LE(sgn(dot(r, s)), 0);
  }
}

TEST(ConeProperty, HrepVrepRoundTrip) {
  std::mt19937_64 rng(18);
  for (int k = 0; k < 100; ++k) {
    auto c = random_cone(rng, 1 + k % 4);
    auto v = ConvexCone::from_vrep(c.dim(), c.rays(), c.lineality());
    EXPECT_EQ(v, c);
    EXPECT_TRUE(v.contains(c) && c.contains(v));
  }
}

TEST(ConeProperty, OrthantHasTwoToTheKFaces) {
  for (std::size_t k = 1; k <= 4; ++k) EXPECT_EQ(ConvexCone::nonpositive_orthant(k).faces().size(), 1u << k);
}

TEST(ConeProperty, FacesShareTheLinealitySpace) {
  std::mt19937_64 rng(19);
  for (int k = 0; k < 60; ++k) {
    auto c = random_cone(rng, 1 + k % 3);
    for (const auto& f : c.faces()) {
      EXPECT_EQ(f.lineality_space(), c.lineality_space());
      EXPECT_TRUE(c.contains(f));
    }
  }
}

TEST(ConeProperty, UnionTangentShrinksNearTheBasePoint) {
  // T_C(z) is contained in T_C(zbar) + span{z - zbar} for z near zbar in C
  std::mt19937_64 rng(20);
  std::uniform_int_distribution<int> c(-2, 2);
  for (int k = 0; k < 40; ++k) {
    ConeUnion u(2, {random_cone(rng, 2), random_cone(rng, 2)});
    auto t0 = union_tangent(u, {0, 0});
    for (const auto& piece : u.pieces()) {
      Vec z = piece.relint_point();
      for (const auto& r : piece.rays()) z = z + ratio(c(rng) + 2, 100) * r;
      if (is_zero(z)) continue;
      auto tz = union_tangent(u, z);
      std::vector<ConvexCone> grown;
      for (const auto& p : t0.pieces()) grown.push_back(p.plus(ConvexCone::from_vrep(2, {}, {z})));
      EXPECT_TRUE(ConeUnion(2, grown).covers(tz));
      for (const auto& b : span_of(tz).basis()) EXPECT_TRUE(span_of(t0).contains(b));
    }
  }
}

TEST(Polyhedron, VerticesRaysAndEmptiness) {
  auto box = ConvexPolyhedron::from_hrep(2, {{{1, 0}, 1}, {{-1, 0}, 0}, {{0, 1}, 1}, {{0, -1}, 0}});
  EXPECT_EQ(box.vertices().size(), 4u);
  EXPECT_TRUE(box.rays().empty());
  auto empty = ConvexPolyhedron::from_hrep(1, {{{1}, -1}, {{-1}, -1}});
  EXPECT_TRUE(empty.is_empty());
  auto v = ConvexPolyhedron::from_vrep(2, {{0, 0}, {1, 0}}, {{0, 1}});
  EXPECT_TRUE(v.contains({ratio(1, 2), 7}));
  EXPECT_FALSE(v.contains({ratio(1, 2), -1}));
}

TEST(Polyhedron, MaximizeReportsUnboundedAndOptimum) {
  auto p = ConvexPolyhedron::from_hrep(2, {{{1, 0}, 1}, {{0, 1}, 2}});
  auto r = p.maximize({1, 1});
  ASSERT_EQ(r.status, LinearOptimum::Status::Optimal);
  EXPECT_EQ(r.value, 3);
  EXPECT_EQ(p.maximize({-1, 0}).status, LinearOptimum::Status::Unbounded);
}

TEST(Polyhedron, PreimageAndImageOfAffineMaps) {
  auto p = nonpositive_orthant(1);
  // {x in R^2 : x1 + x2 - 1 <= 0}
  auto q = p.preimage(Mat::from_rows({{1, 1}}, 2), {-1});
  EXPECT_TRUE(q.contains({1, 0}));
  EXPECT_FALSE(q.contains({1, 1}));
  auto img = q.image(Mat::from_rows({{1, 1}}, 2), {0});
  EXPECT_EQ(img, ConvexPolyhedron::from_hrep(1, {{{1}, 1}}));
}
