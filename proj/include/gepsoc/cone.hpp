#pragma once

// Polyhedral convex cones {x : A x <= 0, E x = 0} = cone(rays) + span(lineality)
// with both representations computed exactly on construction (double
// description), plus polarity, faces and the linear-map operations the
// geometry modules need.

#include <gepsoc/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace gepsoc {

/// Linear subspace given by a canonical (RREF) basis.
class Subspace {
 public:
  Subspace() = default;
  Subspace(std::size_t dim, const std::vector<Vec>& generators) : dim_(dim), basis_(span_basis(generators, dim)) {}

  std::size_t ambient_dim() const { return dim_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<Vec>& basis() const& { return basis_; }
  std::vector<Vec> basis() && { return std::move(basis_); }
  bool contains(const Vec& v) const {
    auto b = basis_;
    b.push_back(v);
    return rank_of_rows(b, dim_) == basis_.size();
  }
  bool operator==(const Subspace& o) const { return dim_ == o.dim_ && basis_ == o.basis_; }

 private:
  std::size_t dim_ = 0;
  std::vector<Vec> basis_;
};

namespace detail {

struct DDResult {
  std::vector<Vec> rays;
  std::vector<Vec> lineality;
};

inline int sign_dot(const Vec& a, const Vec& x) { return sgn(dot(a, x)); }

/// Motzkin double description: generators of {x : ineq x <= 0, eq x = 0}.
/// Rays are extreme modulo lineality but not yet canonicalized.
inline DDResult double_description(std::size_t dim, const std::vector<Vec>& ineq, const std::vector<Vec>& eq) {
  std::vector<Vec> lin;
  for (std::size_t i = 0; i < dim; ++i) lin.push_back(unit(dim, i));
  std::vector<Vec> rays;
  // zero sets of rays over the processed rows
  std::vector<std::vector<char>> zero;
  std::vector<Vec> processed;

  auto process = [&](const Vec& a, bool equality) {
    // Cut through the lineality space if possible.
    std::size_t pick = lin.size();
    for (std::size_t j = 0; j < lin.size(); ++j)
      if (sign_dot(a, lin[j]) != 0) {
        pick = j;
        break;
      }
    if (pick < lin.size()) {
      Vec l0 = lin[pick];
      Rat al0 = dot(a, l0);
      if (sgn(al0) > 0) {
        l0 = -l0;
        al0 = -al0;
      }
      lin.erase(lin.begin() + static_cast<std::ptrdiff_t>(pick));
      for (auto& l : lin) {
        Rat c = dot(a, l);
        if (sgn(c) != 0) l = l - (c / al0) * l0;
      }
      for (auto& r : rays) {
        Rat c = dot(a, r);
        if (sgn(c) != 0) r = r - (c / al0) * l0;
      }
      for (auto& z : zero) z.push_back(1);
      if (!equality) {
        rays.push_back(l0);
        std::vector<char> z(processed.size(), 1);
        z.push_back(0);
        zero.push_back(std::move(z));
      }
      processed.push_back(a);
      return;
    }
    std::vector<std::size_t> pos, neg, nul;
    std::vector<Rat> val(rays.size());
    for (std::size_t i = 0; i < rays.size(); ++i) {
      val[i] = dot(a, rays[i]);
      int s = sgn(val[i]);
      (s > 0 ? pos : s < 0 ? neg : nul).push_back(i);
    }
    std::vector<Vec> next;
    std::vector<std::vector<char>> next_zero;
    for (auto i : nul) {
      next.push_back(rays[i]);
      auto z = zero[i];
      z.push_back(1);
      next_zero.push_back(std::move(z));
    }
    if (!equality)
      for (auto i : neg) {
        next.push_back(rays[i]);
        auto z = zero[i];
        z.push_back(0);
        next_zero.push_back(std::move(z));
      }
    std::size_t nproc = processed.size();
    for (auto p : pos)
      for (auto n : neg) {
        // combinatorial adjacency: no third ray vanishes on the common zero set
        std::vector<std::size_t> common;
        for (std::size_t k = 0; k < nproc; ++k)
          if (zero[p][k] && zero[n][k]) common.push_back(k);
        bool adjacent = true;
        for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (r == p || r == n) continue;
          bool all = true;
          for (auto k : common)
            if (!zero[r][k]) {
              all = false;
              break;
            }
          if (all) adjacent = false;
        }
        if (!adjacent) continue;
        Vec v = val[p] * rays[n] - val[n] * rays[p];
        next.push_back(primitive(v));
        std::vector<char> z(nproc + 1, 0);
        for (auto k : common) z[k] = 1;
        z[nproc] = 1;
        next_zero.push_back(std::move(z));
      }
    rays = std::move(next);
    zero = std::move(next_zero);
    processed.push_back(a);
  };

  for (const auto& e : eq) process(e, true);
  for (const auto& a : ineq) process(a, false);
  return {std::move(rays), std::move(lin)};
}

/// Canonical generators: RREF lineality basis; rays projected onto the
/// lineality complement, made primitive, deduplicated and filtered to the
/// extreme ones with respect to the given constraint rows.
inline DDResult canonicalize(std::size_t dim, const DDResult& raw, const std::vector<Vec>& ineq,
                             const std::vector<Vec>& eq) {
  DDResult out;
  out.lineality = span_basis(raw.lineality, dim);
  std::vector<Vec> all = eq;
  all.insert(all.end(), ineq.begin(), ineq.end());
  std::size_t full_rank = rank_of_rows(all, dim);
  for (const auto& r : raw.rays) {
    Vec p = primitive(project_out(r, out.lineality));
    if (is_zero(p)) continue;
    if (std::find(out.rays.begin(), out.rays.end(), p) != out.rays.end()) continue;
    std::vector<Vec> tight = eq;
    for (const auto& a : ineq)
      if (sgn(dot(a, p)) == 0) tight.push_back(a);
    bool valid = std::all_of(ineq.begin(), ineq.end(), [&](const Vec& a) { return sgn(dot(a, p)) <= 0; }) &&
                 std::all_of(eq.begin(), eq.end(), [&](const Vec& e) { return sgn(dot(e, p)) == 0; });
    if (!valid) throw ContractViolation("double description produced an infeasible generator");
    if (rank_of_rows(tight, dim) + 1 != full_rank) continue;
    out.rays.push_back(std::move(p));
  }
  std::sort(out.rays.begin(), out.rays.end(), lex_less);
  return out;
}

}  // namespace detail

/// Closed convex polyhedral cone with canonical H- and V-representations.
///
/// H-rep: facets f (f.x <= 0) and an RREF basis of equality normals.
/// V-rep: extreme rays (orthogonal to the lineality space) and an RREF
/// lineality basis. Both are unique for a given set, so equality of cones is
/// equality of representations.
class ConvexCone {
 public:
  ConvexCone() = default;

  static ConvexCone from_hrep(std::size_t dim, const std::vector<Vec>& ineq, const std::vector<Vec>& eq = {}) {
    for (const auto& a : ineq) require_dim(a.size() == dim, "cone inequality has wrong length");
    for (const auto& e : eq) require_dim(e.size() == dim, "cone equality has wrong length");
    auto raw = detail::double_description(dim, ineq, eq);
    auto v = detail::canonicalize(dim, raw, ineq, eq);
    return from_canonical_vrep(dim, std::move(v));
  }

  static ConvexCone from_vrep(std::size_t dim, const std::vector<Vec>& rays, const std::vector<Vec>& lineality = {}) {
    for (const auto& r : rays) require_dim(r.size() == dim, "cone ray has wrong length");
    for (const auto& l : lineality) require_dim(l.size() == dim, "cone lineality vector has wrong length");
    // H-rep of the cone = generators of its polar.
    auto raw = detail::double_description(dim, rays, lineality);
    auto h = detail::canonicalize(dim, raw, rays, lineality);
    // Canonical V-rep back from the irredundant H-rep.
    return from_hrep(dim, h.rays, h.lineality);
  }

  static ConvexCone full(std::size_t dim) { return from_hrep(dim, {}); }
  static ConvexCone zero(std::size_t dim) {
    std::vector<Vec> eq;
    for (std::size_t i = 0; i < dim; ++i) eq.push_back(unit(dim, i));
    return from_hrep(dim, {}, eq);
  }
  static ConvexCone nonpositive_orthant(std::size_t dim) {
    std::vector<Vec> ineq;
    for (std::size_t i = 0; i < dim; ++i) ineq.push_back(unit(dim, i));
    return from_hrep(dim, ineq);
  }
  static ConvexCone nonnegative_orthant(std::size_t dim) { return nonpositive_orthant(dim).polar(); }

  std::size_t dim() const { return dim_; }
  const std::vector<Vec>& facets() const& { return facets_; }
  std::vector<Vec> facets() && { return std::move(facets_); }
  const std::vector<Vec>& equalities() const& { return equalities_; }
  std::vector<Vec> equalities() && { return std::move(equalities_); }
  const std::vector<Vec>& rays() const& { return rays_; }
  std::vector<Vec> rays() && { return std::move(rays_); }
  const std::vector<Vec>& lineality() const& { return lineality_; }
  std::vector<Vec> lineality() && { return std::move(lineality_); }

  /// Dimension of the cone itself (of its span).
  std::size_t cone_dim() const { return dim_ - equalities_.size(); }
  bool is_zero() const { return rays_.empty() && lineality_.empty(); }
  bool is_full() const { return facets_.empty() && equalities_.empty(); }
  bool is_subspace() const { return rays_.empty(); }

  bool contains(const Vec& x) const {
    require_dim(x.size() == dim_, "cone membership: dimension mismatch");
    for (const auto& e : equalities_)
      if (sgn(dot(e, x)) != 0) return false;
    for (const auto& f : facets_)
      if (sgn(dot(f, x)) > 0) return false;
    return true;
  }

  bool contains(const ConvexCone& o) const {
    require_dim(o.dim_ == dim_, "cone inclusion: dimension mismatch");
    for (const auto& r : o.rays_)
      if (!contains(r)) return false;
    for (const auto& l : o.lineality_)
      if (!contains(l) || !contains(-l)) return false;
    return true;
  }

  ConvexCone polar() const {
    ConvexCone p;
    p.dim_ = dim_;
    p.facets_ = rays_;
    p.equalities_ = lineality_;
    p.rays_ = facets_;
    p.lineality_ = equalities_;
    return p;
  }

  Subspace span() const {
    auto g = rays_;
    g.insert(g.end(), lineality_.begin(), lineality_.end());
    return Subspace(dim_, g);
  }
  Subspace lineality_space() const { return Subspace(dim_, lineality_); }

  /// A point in the relative interior (sum of generators).
  Vec relint_point() const {
    Vec p = zeros(dim_);
    for (const auto& r : rays_) p = p + r;
    return p;
  }

  ConvexCone intersect(const ConvexCone& o) const {
    require_dim(o.dim_ == dim_, "cone intersection: dimension mismatch");
    auto ineq = facets_;
    ineq.insert(ineq.end(), o.facets_.begin(), o.facets_.end());
    auto eq = equalities_;
    eq.insert(eq.end(), o.equalities_.begin(), o.equalities_.end());
    return from_hrep(dim_, ineq, eq);
  }

  ConvexCone with_inequality(const Vec& a) const {
    auto ineq = facets_;
    ineq.push_back(a);
    return from_hrep(dim_, ineq, equalities_);
  }
  ConvexCone with_equality(const Vec& a) const {
    auto eq = equalities_;
    eq.push_back(a);
    return from_hrep(dim_, facets_, eq);
  }

  /// Minkowski sum.
  ConvexCone plus(const ConvexCone& o) const {
    auto r = rays_;
    r.insert(r.end(), o.rays_.begin(), o.rays_.end());
    auto l = lineality_;
    l.insert(l.end(), o.lineality_.begin(), o.lineality_.end());
    return from_vrep(dim_, r, l);
  }
  ConvexCone negated() const {
    std::vector<Vec> r;
    for (const auto& x : rays_) r.push_back(-x);
    return from_vrep(dim_, r, lineality_);
  }

  /// {M x : x in cone}.
  ConvexCone image(const Mat& m) const {
    require_dim(m.cols() == dim_, "cone image: dimension mismatch");
    std::vector<Vec> r, l;
    for (const auto& x : rays_) r.push_back(m * x);
    for (const auto& x : lineality_) l.push_back(m * x);
    return from_vrep(m.rows(), r, l);
  }

  /// {x : M x in cone}.
  ConvexCone preimage(const Mat& m) const {
    require_dim(m.rows() == dim_, "cone preimage: dimension mismatch");
    Mat mt = m.transpose();
    std::vector<Vec> ineq, eq;
    for (const auto& f : facets_) ineq.push_back(mt * f);
    for (const auto& e : equalities_) eq.push_back(mt * e);
    return from_hrep(m.cols(), ineq, eq);
  }

  /// Cartesian product, this cone's coordinates first.
  ConvexCone product(const ConvexCone& o) const {
    std::size_t n = dim_ + o.dim_;
    std::vector<Vec> ineq, eq;
    for (const auto& f : facets_) ineq.push_back(concat(f, zeros(o.dim_)));
    for (const auto& f : o.facets_) ineq.push_back(concat(zeros(dim_), f));
    for (const auto& e : equalities_) eq.push_back(concat(e, zeros(o.dim_)));
    for (const auto& e : o.equalities_) eq.push_back(concat(zeros(dim_), e));
    return from_hrep(n, ineq, eq);
  }

  /// Tangent cone of this cone at a member point x.
  ConvexCone tangent_at(const Vec& x) const {
    if (!contains(x)) throw Error("tangent cone requested at a point outside the cone");
    std::vector<Vec> act;
    for (const auto& f : facets_)
      if (sgn(dot(f, x)) == 0) act.push_back(f);
    return from_hrep(dim_, act, equalities_);
  }

  /// Critical cone T_K(x) cap [x*]^perp for x in K, x* in N_K(x).
  ConvexCone critical_at(const Vec& x, const Vec& xstar) const {
    auto t = tangent_at(x);
    if (!t.polar().contains(xstar)) throw Error("critical cone: covector is not normal at the point");
    return t.with_equality(xstar);
  }

  /// Whether some point of the cone has a.x > 0.
  bool exceeds(const Vec& a) const {
    for (const auto& r : rays_)
      if (sgn(dot(a, r)) > 0) return true;
    for (const auto& l : lineality_)
      if (sgn(dot(a, l)) != 0) return true;
    return false;
  }

  /// All faces, each K cap {f_i . x = 0 : i in I} for a subset I of facets
  /// (equivalently K cap [v*]^perp with v* a sum of polar extreme rays).
  std::vector<ConvexCone> faces() const {
    std::vector<ConvexCone> out;
    std::size_t k = facets_.size();
    if (k > 20) throw Error("face enumeration beyond desk scale");
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      std::vector<Vec> eq = equalities_;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (1u << i)) eq.push_back(facets_[i]);
      auto f = from_hrep(dim_, facets_, eq);
      if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(std::move(f));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool operator==(const ConvexCone& o) const {
    return dim_ == o.dim_ && rays_ == o.rays_ && lineality_ == o.lineality_;
  }
  bool operator!=(const ConvexCone& o) const { return !(*this == o); }
  /// Deterministic order: lexicographic on the canonical H-rep.
  bool operator<(const ConvexCone& o) const {
    auto key = [](const ConvexCone& c) { return std::tie(c.dim_, c.equalities_, c.facets_); };
    if (dim_ != o.dim_) return dim_ < o.dim_;
    if (equalities_.size() != o.equalities_.size()) return equalities_.size() > o.equalities_.size();
    auto less_list = [](const std::vector<Vec>& a, const std::vector<Vec>& b) {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), lex_less);
    };
    if (equalities_ != o.equalities_) return less_list(equalities_, o.equalities_);
    (void)key;
    return less_list(facets_, o.facets_);
  }

  std::string str() const {
    std::string s = "cone{rays:";
    for (const auto& r : rays_) s += to_string(r);
    s += " lin:";
    for (const auto& l : lineality_) s += to_string(l);
    return s + "}";
  }

 private:
  static ConvexCone from_canonical_vrep(std::size_t dim, detail::DDResult v) {
    ConvexCone c;
    c.dim_ = dim;
    c.rays_ = std::move(v.rays);
    c.lineality_ = std::move(v.lineality);
    auto raw = detail::double_description(dim, c.rays_, c.lineality_);
    auto h = detail::canonicalize(dim, raw, c.rays_, c.lineality_);
    c.facets_ = std::move(h.rays);
    c.equalities_ = std::move(h.lineality);
    return c;
  }

  std::size_t dim_ = 0;
  std::vector<Vec> facets_, equalities_, rays_, lineality_;
};

/// Rank of M restricted to a subspace S equals dim S, i.e. M p = 0, p in S
/// forces p = 0.
inline bool injective_on(const Mat& m, const Subspace& s) {
  if (s.dim() == 0) return true;
  std::vector<Vec> images;
  for (const auto& b : s.basis()) images.push_back(m * b);
  return rank_of_rows(images, m.rows()) == s.dim();
}

}  // namespace gepsoc
