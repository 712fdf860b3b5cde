#pragma once

// Geometry of the graph of the normal-cone map of a convex polyhedron P,
// gph N_P in R^l x R^l with coordinates ordered (d_1..d_l, d*_1..d*_l).
// Everything reduces to the critical cone K = T_P(d) cap [d*]^perp.

#include <gepsoc/cone_union.hpp>

namespace gepsoc {

struct GphPoint {
  Vec d, dstar;
};

struct GphDirection {
  Vec e, estar;
};

inline bool gph_member(const ConvexPolyhedron& p, const Vec& d, const Vec& dstar) {
  require_dim(d.size() == p.dim() && dstar.size() == p.dim(), "gph membership: dimension mismatch");
  return p.contains(d) && p.normal_at(d).contains(dstar);
}

inline ConvexCone critical_cone(const ConvexPolyhedron& p, const Vec& d, const Vec& dstar) {
  if (!gph_member(p, d, dstar)) throw Error("point is not in the graph of the normal cone map");
  return p.critical_at(d, dstar);
}

/// gph N_K for a polyhedral cone K: union over faces F of F x (K° cap F^perp).
inline ConeUnion gph_normal_of_cone(const ConvexCone& k) {
  std::vector<ConvexCone> pieces;
  auto kp = k.polar();
  for (const auto& f : k.faces()) {
    auto n = kp;
    for (const auto& r : f.rays()) n = n.with_equality(r);
    for (const auto& l : f.lineality()) n = n.with_equality(l);
    pieces.push_back(f.product(n));
  }
  return ConeUnion(2 * k.dim(), std::move(pieces));
}

/// (e, e*) in gph N_K, i.e. e in K, e* in K°, <e, e*> = 0.
inline bool in_gph_of_cone(const ConvexCone& k, const Vec& e, const Vec& estar) {
  return k.contains(e) && k.polar().contains(estar) && sgn(dot(e, estar)) == 0;
}

/// T_{gph N_P}(d, d*) = gph N_K.
inline ConeUnion tangent_gph(const ConvexPolyhedron& p, const GphPoint& pt) {
  return gph_normal_of_cone(critical_cone(p, pt.d, pt.dstar));
}

inline ConvexCone checked_second_critical(const ConvexPolyhedron& p, const GphPoint& pt, const GphDirection& dir) {
  auto k = critical_cone(p, pt.d, pt.dstar);
  if (!in_gph_of_cone(k, dir.e, dir.estar)) throw Error("direction is not tangent to the graph");
  return k.critical_at(dir.e, dir.estar);
}

/// T^2_{gph N_P}((d,d*);(e,e*)) = gph N_{K'} with K' the critical cone of K
/// at (e, e*).
inline ConeUnion second_tangent_gph(const ConvexPolyhedron& p, const GphPoint& pt, const GphDirection& dir) {
  return gph_normal_of_cone(checked_second_critical(p, pt, dir));
}

/// Regular normal cone K° x K.
inline ConvexCone regular_normal_gph(const ConvexPolyhedron& p, const GphPoint& pt) {
  auto k = critical_cone(p, pt.d, pt.dstar);
  return k.polar().product(k);
}

/// Directional limiting normal cone: union of (F1 - F2)° x (F1 - F2) over
/// faces e in F2 subset F1 subset [e*]^perp of K.
inline ConeUnion dir_limiting_normal_gph(const ConvexPolyhedron& p, const GphPoint& pt, const GphDirection& dir) {
  auto k = critical_cone(p, pt.d, pt.dstar);
  if (!in_gph_of_cone(k, dir.e, dir.estar)) throw Error("direction is not tangent to the graph");
  auto fs = k.faces();
  std::vector<ConvexCone> pieces;
  for (const auto& f1 : fs) {
    bool orth = std::all_of(f1.rays().begin(), f1.rays().end(), [&](const Vec& r) { return sgn(dot(r, dir.estar)) == 0; });
    // lineality is shared by all faces and orthogonal to any e* in K°
    if (!orth) continue;
    for (const auto& f2 : fs) {
      if (!f2.contains(dir.e) || !f1.contains(f2)) continue;
      auto rays = f1.rays();
      for (const auto& r : f2.rays()) rays.push_back(-r);
      auto diff = ConvexCone::from_vrep(k.dim(), rays, k.lineality());
      auto piece = diff.polar().product(diff);
      if (std::find(pieces.begin(), pieces.end(), piece) == pieces.end()) pieces.push_back(std::move(piece));
    }
  }
  return ConeUnion(2 * k.dim(), std::move(pieces));
}

/// Regular normal cone of T_{gph N_P}(d,d*) at (e,e*): the intersection of
/// the polars of the pieces of T^2.
inline ConvexCone regular_normal_of_tangent(const ConvexPolyhedron& p, const GphPoint& pt, const GphDirection& dir) {
  auto t2 = second_tangent_gph(p, pt, dir);
  ConvexCone out = ConvexCone::full(t2.dim());
  for (const auto& piece : t2.pieces()) out = out.intersect(piece.polar());
  return out;
}

// Coordinatewise closed forms for P = R^l_-.

enum class GphQuery { Tangent, DirNormal, RegularNormalOfTangent };

namespace detail {

inline ConvexCone plane_cone(std::vector<Vec> ineq, std::vector<Vec> eq) { return ConvexCone::from_hrep(2, ineq, eq); }
inline ConvexCone real_by_zero() { return plane_cone({}, {{Rat(0), Rat(1)}}); }
inline ConvexCone zero_by_real() { return plane_cone({}, {{Rat(1), Rat(0)}}); }

/// One coordinate of gph N_{R_-} at (a, b) with direction (c, d).
inline ConeUnion halfline_table(const Rat& a, const Rat& b, const Rat& c, const Rat& d, GphQuery which) {
  int sa = sgn(a), sb = sgn(b), sc = sgn(c), sd = sgn(d);
  if (sa > 0 || sb < 0 || (sa < 0 && sb != 0)) throw Error("point is not in gph N_{R_-}");
  auto u = [](std::vector<ConvexCone> v) { return ConeUnion(2, std::move(v)); };
  if (which == GphQuery::Tangent) {
    if (sa < 0) return u({real_by_zero()});
    if (sb > 0) return u({zero_by_real()});
    return u({plane_cone({{Rat(1), Rat(0)}}, {{Rat(0), Rat(1)}}), plane_cone({{Rat(0), Rat(-1)}}, {{Rat(1), Rat(0)}})});
  }
  // direction must be tangent
  bool tangent = sa < 0 ? sd == 0 : sb > 0 ? sc == 0 : ((sc <= 0 && sd == 0) || (sc == 0 && sd >= 0));
  if (!tangent) throw Error("direction is not tangent to gph N_{R_-}");
  if (sa < 0) return u({zero_by_real()});
  if (sb > 0) return u({real_by_zero()});
  if (sc < 0) return u({zero_by_real()});
  if (sd > 0) return u({real_by_zero()});
  auto plus_minus = plane_cone({{Rat(-1), Rat(0)}, {Rat(0), Rat(1)}}, {});
  if (which == GphQuery::RegularNormalOfTangent) return u({plus_minus});
  return u({zero_by_real(), real_by_zero(), plus_minus});
}

/// Interleaved (x_1, y_1, x_2, y_2, ...) -> (x_1..x_l, y_1..y_l).
inline Mat deinterleave(std::size_t l) {
  std::vector<std::size_t> perm(2 * l);
  for (std::size_t i = 0; i < l; ++i) {
    perm[i] = 2 * i;
    perm[l + i] = 2 * i + 1;
  }
  return permutation_matrix(perm);
}

}  // namespace detail

/// Closed-form evaluation for P = R^l_- assembled as a product of the
/// one-dimensional tables. For the tangent query the direction is ignored.
inline ConeUnion box_fast_path(const ConvexPolyhedron& p, const GphPoint& pt, const GphDirection& dir, GphQuery which) {
  if (!is_nonpositive_orthant(p)) throw Error("box fast path requires P = R^l_-");
  std::size_t l = p.dim();
  require_dim(pt.d.size() == l && pt.dstar.size() == l, "box fast path: point dimension mismatch");
  bool need_dir = which != GphQuery::Tangent;
  if (need_dir) require_dim(dir.e.size() == l && dir.estar.size() == l, "box fast path: direction dimension mismatch");
  ConeUnion acc(0, {ConvexCone::full(0)});
  for (std::size_t i = 0; i < l; ++i) {
    Rat c = need_dir ? dir.e[i] : Rat(0), d = need_dir ? dir.estar[i] : Rat(0);
    acc = product(acc, detail::halfline_table(pt.d[i], pt.dstar[i], c, d, which));
  }
  return image(acc, detail::deinterleave(l));
}

}  // namespace gepsoc
