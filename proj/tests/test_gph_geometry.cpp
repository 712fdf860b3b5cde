#include <gepsoc/gph_geometry.hpp>

#include "support/gph_corpus.hpp"

#include <gtest/gtest.h>

using namespace gepsoc;
using gepsoc::testing::random_gph_case;
using gepsoc::testing::random_member;

namespace {

ConvexCone C2(std::vector<Vec> ineq, std::vector<Vec> eq = {}) { return ConvexCone::from_hrep(2, ineq, eq); }

// Named pieces of the plane for P = R_- in coordinates (d, d*).
ConvexCone rminus_by_zero() { return C2({{1, 0}}, {{0, 1}}); }
ConvexCone zero_by_rplus() { return C2({{0, -1}}, {{1, 0}}); }
ConvexCone real_by_zero() { return C2({}, {{0, 1}}); }
ConvexCone zero_by_real() { return C2({}, {{1, 0}}); }
ConvexCone rplus_by_rminus() { return C2({{-1, 0}, {0, 1}}); }

ConeUnion U(std::vector<ConvexCone> pieces) { return ConeUnion(2, std::move(pieces)); }

const ConvexPolyhedron R1 = nonpositive_orthant(1);

}  // namespace

TEST(GphGeometry, MembershipExamples) {
  EXPECT_TRUE(gph_member(R1, {0}, {1}));
  EXPECT_FALSE(gph_member(R1, {-1}, {1}));
  EXPECT_TRUE(gph_member(nonpositive_orthant(2), {0, -1}, {1, 0}));
  EXPECT_THROW(gph_member(R1, {0, 0}, {1}), DimensionError);
}

TEST(GphGeometry, TangentExamples) {
  EXPECT_TRUE(union_equal(tangent_gph(R1, {{0}, {0}}), U({rminus_by_zero(), zero_by_rplus()})));
  EXPECT_TRUE(union_equal(tangent_gph(R1, {{-1}, {0}}), U({real_by_zero()})));
  EXPECT_TRUE(union_equal(tangent_gph(R1, {{0}, {2}}), U({zero_by_real()})));
  EXPECT_THROW(tangent_gph(R1, {{-1}, {1}}), Error);
}

TEST(GphGeometry, SecondTangentExamples) {
  GphPoint o{{0}, {0}};
  EXPECT_TRUE(union_equal(second_tangent_gph(R1, o, {{-1}, {0}}), U({real_by_zero()})));
  EXPECT_TRUE(union_equal(second_tangent_gph(R1, o, {{0}, {1}}), U({zero_by_real()})));
  EXPECT_TRUE(union_equal(second_tangent_gph(R1, o, {{0}, {0}}), tangent_gph(R1, o)));
  EXPECT_THROW(second_tangent_gph(R1, o, {{1}, {0}}), Error);
}

TEST(GphGeometry, RegularNormalExamples) {
  EXPECT_EQ(regular_normal_gph(R1, {{0}, {0}}), rplus_by_rminus());
  EXPECT_EQ(regular_normal_gph(R1, {{-1}, {0}}), zero_by_real());
  auto r2 = nonpositive_orthant(2);
  EXPECT_EQ(regular_normal_gph(r2, {{0, 0}, {0, 0}}),
            ConvexCone::nonnegative_orthant(2).product(ConvexCone::nonpositive_orthant(2)));
}

TEST(GphGeometry, DirectionalNormalExamples) {
  GphPoint o{{0}, {0}};
  EXPECT_TRUE(union_equal(dir_limiting_normal_gph(R1, o, {{0}, {0}}),
                          U({zero_by_real(), real_by_zero(), rplus_by_rminus()})));
  EXPECT_TRUE(union_equal(dir_limiting_normal_gph(R1, o, {{-1}, {0}}), U({zero_by_real()})));
  EXPECT_TRUE(union_equal(dir_limiting_normal_gph(R1, o, {{0}, {1}}), U({real_by_zero()})));
  EXPECT_THROW(dir_limiting_normal_gph(R1, o, {{-1}, {1}}), Error);
}

TEST(GphGeometry, RegularNormalOfTangentExamples) {
  GphPoint o{{0}, {0}};
  EXPECT_EQ(regular_normal_of_tangent(R1, o, {{0}, {0}}), rplus_by_rminus());
  EXPECT_EQ(regular_normal_of_tangent(R1, o, {{-1}, {0}}), zero_by_real());
  EXPECT_EQ(regular_normal_of_tangent(R1, o, {{0}, {1}}), real_by_zero());
}

TEST(GphGeometry, CriticalConeOfOrthant) {
  EXPECT_EQ(critical_cone(nonpositive_orthant(2), {0, -1}, {1, 0}), C2({}, {{1, 0}}));
  EXPECT_TRUE(critical_cone(R1, {0}, {1}).is_zero());
}

TEST(GphGeometry, BoxFastPathProductOfRows) {
  auto r2 = nonpositive_orthant(2);
  GphPoint pt{{0, 0}, {0, 1}};
  GphDirection dir{{-1, 0}, {0, 3}};
  // row "c < 0, d = 0" gives {0} x R in coordinate 1; row "a = 0, b > 0"
  // gives R x {0} in coordinate 2; reassembled as (d1, d2, d1*, d2*)
  auto expect = ConvexCone::from_hrep(4, {}, {{1, 0, 0, 0}, {0, 0, 0, 1}});
  auto fast = box_fast_path(r2, pt, dir, GphQuery::DirNormal);
  EXPECT_TRUE(union_equal(fast, ConeUnion(4, {expect})));
  EXPECT_TRUE(union_equal(fast, dir_limiting_normal_gph(r2, pt, dir)));
  EXPECT_TRUE(union_equal(box_fast_path(R1, {{0}, {0}}, {{0}, {0}}, GphQuery::DirNormal),
                          U({zero_by_real(), real_by_zero(), rplus_by_rminus()})));
  EXPECT_THROW(box_fast_path(ConvexPolyhedron::from_hrep(1, {{{1}, 1}}), {{0}, {0}}, {}, GphQuery::Tangent), Error);
}

TEST(GphGeometry, BoxFastPathMatchesGeneralPathOnAllStrata) {
  // every sign pattern of (d, d*, e, e*) on R^2_- that is a valid tangent pair
  std::vector<std::array<int, 4>> strata;
  for (int a : {-1, 0})
    for (int b : {0, 1})
      for (int c : {-1, 0, 1})
        for (int d : {-1, 0, 1}) {
          if (a < 0 && b > 0) continue;
          if (!in_gph_of_cone(R1.critical_at({a}, {b}), {c}, {d})) continue;
          strata.push_back({a, b, c, d});
        }
  auto r2 = nonpositive_orthant(2);
  for (const auto& s : strata)
    for (const auto& t : strata) {
      GphPoint pt{{s[0], t[0]}, {s[1], t[1]}};
      GphDirection dir{{s[2], t[2]}, {s[3], t[3]}};
      EXPECT_TRUE(union_equal(box_fast_path(r2, pt, dir, GphQuery::Tangent), tangent_gph(r2, pt)));
      EXPECT_TRUE(union_equal(box_fast_path(r2, pt, dir, GphQuery::DirNormal), dir_limiting_normal_gph(r2, pt, dir)));
      EXPECT_TRUE(union_equal(box_fast_path(r2, pt, dir, GphQuery::RegularNormalOfTangent),
                              ConeUnion(4, {regular_normal_of_tangent(r2, pt, dir)})));
    }
}

TEST(GphGeometryProperty, RegularNormalLiesInDirectionalNormal) {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 60; ++k) {
    auto c = random_gph_case(rng);
    auto t = tangent_gph(c.P, c.pt);
    const auto& piece = t.pieces()[static_cast<std::size_t>(k) % t.size()];
    Vec w = random_member(rng, piece);
    std::size_t l = c.P.dim();
    GphDirection dir{slice(w, 0, l), slice(w, l, l)};
    auto reg = regular_normal_of_tangent(c.P, c.pt, dir);
    auto lim = dir_limiting_normal_gph(c.P, c.pt, dir);
    EXPECT_TRUE(lim.covers(reg));
  }
}

TEST(GphGeometryProperty, OutputsAreInvariantUnderDirectionScaling) {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 40; ++k) {
    auto c = random_gph_case(rng);
    auto t = tangent_gph(c.P, c.pt);
    Vec w = random_member(rng, t.pieces()[static_cast<std::size_t>(k) % t.size()]);
    std::size_t l = c.P.dim();
    GphDirection dir{slice(w, 0, l), slice(w, l, l)};
    GphDirection scaled{Rat(3) * dir.e, Rat(3) * dir.estar};
    EXPECT_TRUE(union_equal(second_tangent_gph(c.P, c.pt, dir), second_tangent_gph(c.P, c.pt, scaled)));
    EXPECT_TRUE(union_equal(dir_limiting_normal_gph(c.P, c.pt, dir), dir_limiting_normal_gph(c.P, c.pt, scaled)));
    EXPECT_EQ(regular_normal_of_tangent(c.P, c.pt, dir), regular_normal_of_tangent(c.P, c.pt, scaled));
  }
}

TEST(GphGeometryProperty, TangentPiecesAreComplementaryPairs) {
  std::mt19937_64 rng(43);
  for (int k = 0; k < 60; ++k) {
    auto c = random_gph_case(rng);
    auto K = critical_cone(c.P, c.pt.d, c.pt.dstar);
    std::size_t l = c.P.dim();
    for (auto all = tangent_gph(c.P, c.pt); const auto& piece : all.pieces()) {
      Vec w = random_member(rng, piece);
      EXPECT_TRUE(in_gph_of_cone(K, slice(w, 0, l), slice(w, l, l)));
    }
  }
}
