#pragma once

// Constraint systems Gamma = {z : G(z) in D} with polynomial G and a
// polyhedral union D, either gph N_P or an explicit PolyhedronUnion.

#include <gepsoc/gph_geometry.hpp>
#include <gepsoc/poly_fn.hpp>

#include <variant>

namespace gepsoc {

/// The set D together with its first and second order objects.
class Target {
 public:
  static Target gph_normal(ConvexPolyhedron p) {
    Target t;
    t.dim_ = 2 * p.dim();
    t.set_ = std::move(p);
    return t;
  }
  static Target explicit_union(PolyhedronUnion u) {
    Target t;
    t.dim_ = u.dim();
    t.set_ = std::move(u);
    return t;
  }

  std::size_t dim() const { return dim_; }
  bool is_gph() const { return std::holds_alternative<ConvexPolyhedron>(set_); }
  const ConvexPolyhedron& polyhedron() const { return std::get<ConvexPolyhedron>(set_); }

  bool contains(const Vec& y) const {
    require_dim(y.size() == dim_, "target membership: dimension mismatch");
    if (is_gph()) {
      auto [pt, _] = split(y, {});
      return gph_member(polyhedron(), pt.d, pt.dstar);
    }
    return std::get<PolyhedronUnion>(set_).contains(y);
  }

  ConeUnion tangent(const Vec& y) const {
    if (is_gph()) return tangent_gph(polyhedron(), split(y, {}).first);
    return union_tangent(std::get<PolyhedronUnion>(set_), y);
  }

  /// T^2_D(y; w) = T_{T_D(y)}(w).
  ConeUnion second_tangent(const Vec& y, const Vec& w) const {
    if (is_gph()) {
      auto [pt, dir] = split(y, w);
      return second_tangent_gph(polyhedron(), pt, dir);
    }
    return union_tangent(tangent(y), w);
  }

  /// N_D(y; w) = N_{T_D(y)}(w).
  ConeUnion dir_normal(const Vec& y, const Vec& w) const {
    if (is_gph()) {
      auto [pt, dir] = split(y, w);
      return dir_limiting_normal_gph(polyhedron(), pt, dir);
    }
    return union_dir_limiting_normal(std::get<PolyhedronUnion>(set_), y, w);
  }

  /// Regular normal cone of T_D(y) at w.
  ConvexCone regular_normal_of_tangent(const Vec& y, const Vec& w) const {
    if (is_gph()) {
      auto [pt, dir] = split(y, w);
      return gepsoc::regular_normal_of_tangent(polyhedron(), pt, dir);
    }
    return union_regular_normal(tangent(y), w);
  }

 private:
  std::pair<GphPoint, GphDirection> split(const Vec& y, const Vec& w) const {
    std::size_t l = dim_ / 2;
    GphPoint pt{slice(y, 0, l), slice(y, l, l)};
    GphDirection dir;
    if (!w.empty()) {
      require_dim(w.size() == dim_, "target direction: dimension mismatch");
      dir = {slice(w, 0, l), slice(w, l, l)};
    }
    return {pt, dir};
  }

  std::size_t dim_ = 0;
  std::variant<ConvexPolyhedron, PolyhedronUnion> set_;
};

enum class MultiplierKind { S, M };

/// Solutions of grad G^T p = z* intersected piecewise with a cone
/// constraint (the regular normal cone for S, the directional limiting
/// normal cone for M).
struct MultiplierSet {
  std::optional<AffineSolution> base;    // solutions of the linear equation alone
  ConeUnion constraint;                  // cone the multiplier must lie in
  std::vector<ConvexPolyhedron> pieces;  // nonempty per-piece solution sets

  bool is_empty() const { return pieces.empty(); }
  /// The single multiplier when the set is a singleton.
  std::optional<Vec> unique() const {
    std::optional<Vec> p;
    for (const auto& s : pieces) {
      auto v = s.vertices();
      if (v.size() != 1 || !s.rays().empty() || !s.lineality().empty()) return std::nullopt;
      if (p && *p != v.front()) return std::nullopt;
      p = v.front();
    }
    return p;
  }
};

/// Lower and upper bounds of <p*, q> over a multiplier set.
struct MultiplierRange {
  ExtRat inf, sup;
};

struct Curvature {
  ExtRat sigma, sigma_hat, d2delta;
};

class GammaSystem {
 public:
  GammaSystem(PolyMap g, Target d) : g_(std::move(g)), d_(std::move(d)) {
    require_dim(g_.dim_out() == d_.dim(), "G output dimension differs from the ambient dimension of D");
  }

  const PolyMap& map() const { return g_; }
  const Target& target() const { return d_; }
  std::size_t dim() const { return g_.dim_in(); }

  bool feasible(const Vec& z) const { return d_.contains(g_.eval(z)); }

  /// L(z) = {w : grad G(z) w in T_D(G(z))}, a union of cones.
  ConeUnion linearization_cone(const Vec& z) const {
    require_feasible(z);
    return preimage(d_.tangent(g_.eval(z)), g_.jacobian(z));
  }

  bool in_linearization_cone(const Vec& z, const Vec& w) const {
    require_feasible(z);
    return d_.tangent(g_.eval(z)).contains(g_.jacobian(z) * w);
  }

  ConeUnion normal_target(const Vec& z, const Vec& w) const {
    require_direction(z, w);
    return d_.dir_normal(g_.eval(z), g_.jacobian(z) * w);
  }

  /// grad G^T p = 0 with p in span N_D(G(z); grad G(z) w) forces p = 0.
  bool dir_nondegeneracy(const Vec& z, const Vec& w) const {
    auto n = normal_target(z, w);
    return injective_on(g_.jacobian(z).transpose(), span_of(n));
  }

  /// N_Gamma(z; w) = grad G(z)^T N_D(G(z); grad G(z) w).
  ConeUnion dir_normal_gamma(const Vec& z, const Vec& w) const {
    if (!dir_nondegeneracy(z, w)) throw Error("directional nondegeneracy fails; normal cone formula not licensed");
    return image(normal_target(z, w), g_.jacobian(z).transpose());
  }

  /// grad G(z)^T of the regular normal cone of T_D(G(z)) at grad G(z) w.
  ConvexCone regular_normal_gamma(const Vec& z, const Vec& w) const {
    require_direction(z, w);
    return d_.regular_normal_of_tangent(g_.eval(z), g_.jacobian(z) * w).image(g_.jacobian(z).transpose());
  }

  /// {v : grad G(z) v + grad^2 G(z)(w,w) in T^2_D(G(z); grad G(z) w)}.
  PolyhedronUnion second_tangent_gamma(const Vec& z, const Vec& w) const {
    require_direction(z, w);
    auto y = g_.eval(z);
    auto jac = g_.jacobian(z);
    return preimage(d_.second_tangent(y, jac * w), jac, g_.hessian_form(z, w));
  }

  MultiplierSet multipliers(const Vec& z, const Vec& w, const Vec& zstar, MultiplierKind kind) const {
    require_direction(z, w);
    require_dim(zstar.size() == dim(), "multiplier covector has wrong length");
    auto y = g_.eval(z);
    auto jac = g_.jacobian(z);
    MultiplierSet out;
    // for polyhedral D the limiting normal cone of T_D(y) at jac w equals the
    // directional limiting normal cone, so the directional form serves both
    out.constraint = kind == MultiplierKind::S ? ConeUnion(d_.dim(), {d_.regular_normal_of_tangent(y, jac * w)})
                                               : d_.dir_normal(y, jac * w);
    Mat jt = jac.transpose();
    out.base = solve_affine(jt, zstar);
    if (!out.base) return out;
    std::vector<HalfSpace> eq;
    for (std::size_t i = 0; i < jt.rows(); ++i) eq.push_back({jt.row(i), zstar[i]});
    auto affine = ConvexPolyhedron::from_hrep(d_.dim(), {}, eq);
    for (const auto& k : out.constraint.pieces()) {
      auto s = affine.intersect(ConvexPolyhedron::from_cone(k));
      if (!s.is_empty()) out.pieces.push_back(std::move(s));
    }
    return out;
  }

  /// inf and sup of <p*, grad^2 G(z)(w,w)> over the M-multipliers.
  MultiplierRange multiplier_range(const Vec& z, const Vec& w, const Vec& zstar) const {
    auto ms = multipliers(z, w, zstar, MultiplierKind::M);
    Vec q = g_.hessian_form(z, w);
    MultiplierRange r{ExtRat::pos_inf(), ExtRat::neg_inf()};
    for (const auto& s : ms.pieces) {
      auto hi = s.maximize(q);
      auto lo = s.maximize(-q);
      ExtRat shi = hi.status == LinearOptimum::Status::Unbounded ? ExtRat::pos_inf() : ExtRat::finite(hi.value);
      ExtRat slo = lo.status == LinearOptimum::Status::Unbounded ? ExtRat::neg_inf() : ExtRat::finite(-lo.value);
      if (r.sup <= shi) r.sup = shi;
      if (slo <= r.inf) r.inf = slo;
    }
    return r;
  }

  /// sigma, sigma-hat of T^2_Gamma(z; w) at z* and the second subderivative
  /// d^2 delta_Gamma(z; z*)(w). Outside the effective domain sigma and
  /// sigma-hat are +inf; d^2 delta follows the sign of <z*, w> off [w]^perp.
  Curvature curvature_gamma(const Vec& z, const Vec& w, const Vec& zstar) const {
    if (!dir_nondegeneracy(z, w)) throw Error("directional nondegeneracy fails; curvature formula not licensed");
    Vec q = g_.hessian_form(z, w);
    auto value = [&](MultiplierKind kind) {
      auto ms = multipliers(z, w, zstar, kind);
      if (ms.is_empty()) return ExtRat::pos_inf();
      auto p = ms.unique();
      if (!p) throw ContractViolation("multiplier is not unique under directional nondegeneracy");
      return ExtRat::finite(-dot(*p, q));
    };
    Curvature c;
    c.sigma = value(MultiplierKind::S);
    c.sigma_hat = value(MultiplierKind::M);
    int s = sgn(dot(zstar, w));
    if (s > 0)
      c.d2delta = ExtRat::neg_inf();
    else if (s < 0)
      c.d2delta = ExtRat::pos_inf();
    else
      c.d2delta = -c.sigma;
    return c;
  }

 private:
  void require_feasible(const Vec& z) const {
    require_dim(z.size() == dim(), "point has wrong length");
    if (!feasible(z)) throw Error("point is not feasible for the constraint system");
  }
  void require_direction(const Vec& z, const Vec& w) const {
    require_dim(w.size() == dim(), "direction has wrong length");
    if (!in_linearization_cone(z, w)) throw Error("direction is not in the linearization cone");
  }

  PolyMap g_;
  Target d_;
};

}  // namespace gepsoc
