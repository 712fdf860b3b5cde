#pragma once

// Finite unions of convex cones or polyhedra in canonical form, set equality
// by mutual coverage, and the tangent / limiting-normal objects of a union.

#include <gepsoc/polyhedron.hpp>

#include <algorithm>
#include <functional>

namespace gepsoc {

namespace detail {

inline std::size_t piece_dim(const ConvexCone& c) { return c.dim(); }
inline std::size_t piece_dim(const ConvexPolyhedron& p) { return p.dim(); }
inline bool piece_empty(const ConvexCone&) { return false; }
inline bool piece_empty(const ConvexPolyhedron& p) { return p.is_empty(); }
inline long piece_size(const ConvexCone& c) { return static_cast<long>(c.cone_dim()); }
inline long piece_size(const ConvexPolyhedron& p) { return p.affine_dim(); }

inline std::vector<HalfSpace> piece_halfspaces(const ConvexCone& c) {
  std::vector<HalfSpace> out;
  for (const auto& f : c.facets()) out.push_back({f, Rat(0)});
  for (const auto& e : c.equalities()) {
    out.push_back({e, Rat(0)});
    out.push_back({-e, Rat(0)});
  }
  return out;
}
inline std::vector<HalfSpace> piece_halfspaces(const ConvexPolyhedron& p) {
  auto out = p.inequalities();
  for (const auto& e : p.equalities()) {
    out.push_back(e);
    out.push_back({-e.normal, -e.rhs});
  }
  return out;
}

inline bool piece_exceeds(const ConvexCone& c, const HalfSpace& h) { return c.exceeds(h.normal); }
inline bool piece_exceeds(const ConvexPolyhedron& p, const HalfSpace& h) { return p.exceeds(h.normal, h.rhs); }
inline ConvexCone piece_restrict(const ConvexCone& c, const HalfSpace& h) { return c.with_inequality(h.normal); }
inline ConvexPolyhedron piece_restrict(const ConvexPolyhedron& p, const HalfSpace& h) {
  return p.with_inequality(h.normal, h.rhs);
}

}  // namespace detail

/// Finite union of convex pieces of a common ambient dimension.
template <class Piece>
class Union {
 public:
  Union() = default;
  explicit Union(std::size_t dim, std::vector<Piece> pieces = {}) : dim_(dim), pieces_(std::move(pieces)) {
    for (const auto& p : pieces_) require_dim(detail::piece_dim(p) == dim_, "union piece has wrong dimension");
    canonicalize();
  }

  std::size_t dim() const { return dim_; }
  const std::vector<Piece>& pieces() const& { return pieces_; }
  std::vector<Piece> pieces() && { return std::move(pieces_); }
  std::size_t size() const { return pieces_.size(); }
  bool is_empty() const { return pieces_.empty(); }

  bool contains(const Vec& x) const {
    return std::any_of(pieces_.begin(), pieces_.end(), [&](const Piece& p) { return p.contains(x); });
  }

  /// Whether the convex set c lies in the union.
  bool covers(const Piece& c) const { return covered(c, pieces_); }
  bool covers(const Union& o) const {
    return std::all_of(o.pieces_.begin(), o.pieces_.end(), [&](const Piece& p) { return covers(p); });
  }

  /// Piecewise intersection with a convex set.
  Union intersect(const Piece& c) const {
    std::vector<Piece> out;
    for (const auto& p : pieces_) out.push_back(p.intersect(c));
    return Union(dim_, std::move(out));
  }

  Union unite(const Union& o) const {
    auto p = pieces_;
    p.insert(p.end(), o.pieces_.begin(), o.pieces_.end());
    return Union(dim_, std::move(p));
  }

  /// Structural equality of canonical forms (sufficient, not necessary, for
  /// set equality; see union_equal).
  bool operator==(const Union& o) const { return dim_ == o.dim_ && pieces_ == o.pieces_; }

  std::string str() const {
    std::string s = "union[";
    for (std::size_t i = 0; i < pieces_.size(); ++i) s += (i ? " " : "") + pieces_[i].str();
    return s + "]";
  }

  /// Recursive subdivision: c is covered by ds iff c cap D is (trivially)
  /// and each slab of c beyond a halfspace of D is covered by the rest.
  static bool covered(const Piece& c, const std::vector<Piece>& ds) {
    if (detail::piece_empty(c)) return true;
    for (const auto& d : ds)
      if (d.contains(c)) return true;
    if (ds.empty()) return false;
    std::size_t best = 0;
    long best_size = -2;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      long s = detail::piece_size(c.intersect(ds[i]));
      if (s > best_size) {
        best_size = s;
        best = i;
      }
    }
    std::vector<Piece> rest;
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (i != best) rest.push_back(ds[i]);
    Piece cur = c;
    for (const auto& h : detail::piece_halfspaces(ds[best])) {
      if (!detail::piece_exceeds(cur, h)) continue;
      Piece beyond = detail::piece_restrict(cur, HalfSpace{-h.normal, -h.rhs});
      if (!covered(beyond, rest)) return false;
      cur = detail::piece_restrict(cur, h);
      if (detail::piece_empty(cur)) break;
    }
    return true;
  }

 private:
  void canonicalize() {
    std::vector<Piece> kept;
    for (const auto& p : pieces_)
      if (!detail::piece_empty(p)) kept.push_back(p);
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    std::vector<Piece> out;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      bool inside = false;
      for (std::size_t j = 0; j < kept.size() && !inside; ++j)
        if (i != j && kept[j].contains(kept[i])) inside = true;
      if (!inside) out.push_back(kept[i]);
    }
    pieces_ = std::move(out);
  }

  std::size_t dim_ = 0;
  std::vector<Piece> pieces_;
};

using ConeUnion = Union<ConvexCone>;
using PolyhedronUnion = Union<ConvexPolyhedron>;

template <class Piece>
bool union_equal(const Union<Piece>& a, const Union<Piece>& b) {
  if (a.dim() != b.dim()) return false;
  if (a == b) return true;
  return b.covers(a) && a.covers(b);
}

inline bool member(const ConvexCone& c, const Vec& v) { return c.contains(v); }
inline bool member(const ConvexPolyhedron& p, const Vec& v) { return p.contains(v); }
template <class Piece>
bool member(const Union<Piece>& u, const Vec& v) {
  return u.contains(v);
}

/// T_C(z): union of the tangent cones of the pieces containing z.
template <class Piece>
ConeUnion union_tangent(const Union<Piece>& u, const Vec& z) {
  std::vector<ConvexCone> out;
  for (const auto& p : u.pieces())
    if (p.contains(z)) out.push_back(p.tangent_at(z));
  if (out.empty()) throw Error("tangent cone requested at a point outside the union");
  return ConeUnion(u.dim(), std::move(out));
}

/// Regular normal cone of a union at a member point: the polar of its
/// tangent cone, i.e. the intersection of the polars of the tangent pieces.
template <class Piece>
ConvexCone union_regular_normal(const Union<Piece>& u, const Vec& z) {
  auto t = union_tangent(u, z);
  ConvexCone out = ConvexCone::full(u.dim());
  for (const auto& k : t.pieces()) out = out.intersect(k.polar());
  return out;
}

namespace detail {

/// Relatively open cells of relint(face) cut by the given hyperplanes
/// (through the origin); returns one representative per cell.
inline std::vector<Vec> cell_representatives(const ConvexCone& face, const std::vector<Vec>& hyperplanes) {
  struct Cell {
    ConvexCone closure;
    std::vector<std::pair<Vec, int>> strict;  // (h, sign) with sign(h.x) required
  };
  std::vector<Cell> cells;
  {
    Cell c{face, {}};
    for (const auto& f : face.facets()) c.strict.push_back({f, -1});
    cells.push_back(std::move(c));
  }
  auto nonempty_point = [](const Cell& c) -> std::optional<Vec> {
    Vec p = c.closure.relint_point();
    for (const auto& [h, s] : c.strict)
      if (sgn(dot(h, p)) != s) return std::nullopt;
    return p;
  };
  for (const auto& h : hyperplanes) {
    std::vector<Cell> next;
    for (const auto& c : cells) {
      bool pos = c.closure.exceeds(h), neg = c.closure.exceeds(-h);
      if (!(pos && neg)) {
        next.push_back(c);
        continue;
      }
      for (int s : {-1, 0, 1}) {
        Cell n = c;
        if (s == 0) {
          n.closure = c.closure.with_equality(h);
        } else {
          n.closure = c.closure.with_inequality(s < 0 ? h : Vec(-h));
          n.strict.push_back({h, s});
        }
        if (nonempty_point(n)) next.push_back(std::move(n));
      }
    }
    cells = std::move(next);
  }
  std::vector<Vec> reps;
  for (const auto& c : cells)
    if (auto p = nonempty_point(c)) reps.push_back(*p);
  return reps;
}

}  // namespace detail

/// Limiting normal cone of a finite union of closed convex cones at the
/// origin, by brute force over strata: every point w of the union lies in a
/// cell on which the set of pieces containing w and their active faces are
/// constant; N of the union at 0 is the union over cells of the regular
/// normal cone at a cell representative.
inline ConeUnion limiting_normal_at_origin(const ConeUnion& t) {
  std::vector<Vec> planes;
  for (const auto& k : t.pieces()) {
    for (const auto& f : k.facets()) planes.push_back(f);
    for (const auto& e : k.equalities()) planes.push_back(e);
  }
  std::sort(planes.begin(), planes.end(), lex_less);
  planes.erase(std::unique(planes.begin(), planes.end()), planes.end());

  std::vector<ConvexCone> faces;
  for (const auto& k : t.pieces())
    for (auto& f : k.faces())
      if (std::find(faces.begin(), faces.end(), f) == faces.end()) faces.push_back(std::move(f));

  std::vector<ConvexCone> normals;
  std::vector<Vec> seen;
  for (const auto& f : faces) {
    std::vector<Vec> cutting;
    for (const auto& h : planes)
      if (f.exceeds(h) && f.exceeds(-h)) cutting.push_back(h);
    for (const auto& w : detail::cell_representatives(f, cutting)) {
      auto n = union_regular_normal(t, w);
      if (std::find(normals.begin(), normals.end(), n) == normals.end()) normals.push_back(std::move(n));
    }
  }
  return ConeUnion(t.dim(), std::move(normals));
}

/// Limiting normal cone of a polyhedral union C at z in direction w, via
/// N_C(z; w) = N_{T_C(z)}(w) and localization at w.
template <class Piece>
ConeUnion union_dir_limiting_normal(const Union<Piece>& c, const Vec& z, const Vec& w) {
  auto t = union_tangent(c, z);
  return limiting_normal_at_origin(union_tangent(t, w));
}

/// Subspace spanned by all pieces.
inline Subspace span_of(const ConeUnion& u) {
  std::vector<Vec> gens;
  for (const auto& k : u.pieces()) {
    gens.insert(gens.end(), k.rays().begin(), k.rays().end());
    gens.insert(gens.end(), k.lineality().begin(), k.lineality().end());
  }
  return Subspace(u.dim(), gens);
}
inline Subspace span_of(const ConvexCone& c) { return c.span(); }
inline Subspace lineality(const ConvexCone& c) { return c.lineality_space(); }

/// Piecewise image / preimage under a linear map.
inline ConeUnion image(const ConeUnion& u, const Mat& m) {
  std::vector<ConvexCone> out;
  for (const auto& k : u.pieces()) out.push_back(k.image(m));
  return ConeUnion(m.rows(), std::move(out));
}
inline ConeUnion preimage(const ConeUnion& u, const Mat& m) {
  std::vector<ConvexCone> out;
  for (const auto& k : u.pieces()) out.push_back(k.preimage(m));
  return ConeUnion(m.cols(), std::move(out));
}
/// {x : M x + c in u}.
inline PolyhedronUnion preimage(const ConeUnion& u, const Mat& m, const Vec& c) {
  std::vector<ConvexPolyhedron> out;
  for (const auto& k : u.pieces()) out.push_back(ConvexPolyhedron::from_cone(k).preimage(m, c));
  return PolyhedronUnion(m.cols(), std::move(out));
}

/// Piecewise Cartesian product of unions.
inline ConeUnion product(const ConeUnion& a, const ConeUnion& b) {
  std::vector<ConvexCone> out;
  for (const auto& x : a.pieces())
    for (const auto& y : b.pieces()) out.push_back(x.product(y));
  return ConeUnion(a.dim() + b.dim(), std::move(out));
}

/// Reorders coordinates: result_i = x_{perm[i]}.
inline Mat permutation_matrix(const std::vector<std::size_t>& perm) {
  Mat m(perm.size(), perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) m(i, perm[i]) = 1;
  return m;
}

}  // namespace gepsoc
