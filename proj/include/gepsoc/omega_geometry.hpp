#pragma once

// Omega = {(x, b(x)^T eta) : eta in N_P(g(x))} near a reference point
// (xbar, b(xbar)^T dbar*). Tangent vectors, directional normals, second
// order tangents and curvature values are all recovered from pieces of the
// gph N_P objects at (g(xbar), dbar*) by exact linear solves.

#include <gepsoc/gamma_system.hpp>

namespace gepsoc {

/// gph N_P objects with an optional switch to the R^l_- closed forms.
class GphEngine {
 public:
  GphEngine() = default;
  explicit GphEngine(ConvexPolyhedron p, bool use_fast_path = false)
      : p_(std::move(p)), fast_(use_fast_path && is_nonpositive_orthant(p_)) {}

  const ConvexPolyhedron& polyhedron() const { return p_; }
  bool fast() const { return fast_; }

  ConeUnion tangent(const GphPoint& pt) const {
    return fast_ ? box_fast_path(p_, pt, {}, GphQuery::Tangent) : tangent_gph(p_, pt);
  }
  ConeUnion second_tangent(const GphPoint& pt, const GphDirection& dir) const {
    return second_tangent_gph(p_, pt, dir);
  }
  ConeUnion dir_normal(const GphPoint& pt, const GphDirection& dir) const {
    return fast_ ? box_fast_path(p_, pt, dir, GphQuery::DirNormal) : dir_limiting_normal_gph(p_, pt, dir);
  }
  ConvexCone regular_normal_of_tangent(const GphPoint& pt, const GphDirection& dir) const {
    if (!fast_) return gepsoc::regular_normal_of_tangent(p_, pt, dir);
    auto u = box_fast_path(p_, pt, dir, GphQuery::RegularNormalOfTangent);
    if (u.size() != 1) throw ContractViolation("regular normal cone of the tangent cone is not convex");
    return u.pieces().front();
  }

 private:
  ConvexPolyhedron p_;
  bool fast_ = false;
};

struct AssumptionReport {
  bool g_ok = false;
  bool b_ok = false;
  std::vector<Vec> span_basis;  // basis of span N_P(g(xbar))
};

/// Injectivity of grad g(xbar)^T and b(xbar)^T on span N_P(g(xbar)).
inline AssumptionReport check_basic_assumptions(const PolyMap& g, const PolyMap& b, const ConvexPolyhedron& p,
                                                const Vec& xbar) {
  require_dim(g.dim_in() == xbar.size() && b.dim_in() == xbar.size(), "assumption check: dimension mismatch");
  require_dim(g.dim_out() == p.dim(), "g output dimension differs from dim P");
  std::size_t l = p.dim();
  require_dim(l > 0 && b.dim_out() % l == 0, "b must have l*m components");
  std::size_t m = b.dim_out() / l;
  Vec gx = g.eval(xbar);
  if (!p.contains(gx)) throw Error("g(xbar) is not in P");
  Subspace s = p.normal_at(gx).span();
  AssumptionReport r;
  r.span_basis = s.basis();
  r.g_ok = injective_on(g.jacobian(xbar).transpose(), s);
  r.b_ok = injective_on(eval_matrix(b, xbar, l, m).transpose(), s);
  return r;
}

/// (x, y) in Omega = {(x, y) : y in b(x)^T N_P(g(x))}.
inline bool omega_member(const PolyMap& g, const PolyMap& b, const ConvexPolyhedron& p, const Vec& omega) {
  std::size_t n = g.dim_in(), l = p.dim();
  require_dim(l > 0 && b.dim_out() % l == 0 && omega.size() == n + b.dim_out() / l, "omega membership: dimension mismatch");
  std::size_t m = b.dim_out() / l;
  Vec x = slice(omega, 0, n), y = slice(omega, n, m);
  Vec gx = g.eval(x);
  if (!p.contains(gx)) return false;
  Mat bt = eval_matrix(b, x, l, m).transpose();
  std::vector<HalfSpace> eq;
  for (std::size_t j = 0; j < m; ++j) eq.push_back({bt.row(j), y[j]});
  return !ConvexPolyhedron::from_cone(p.normal_at(gx)).intersect(ConvexPolyhedron::from_hrep(l, {}, eq)).is_empty();
}

struct TangentWitness {
  Vec u, estar;
  std::size_t piece = 0;  // index into the tangent_gph pieces
};

enum class NormalRegime { Limiting, RegularOfTangent };

struct NormalResult {
  enum class Status { Member, NotNormal, NoDecomposition };
  Status status = Status::NotNormal;
  Vec r, fstar;
  std::size_t piece = 0;
};

struct SecondTangentWitness {
  Vec zeta, xistar;
  std::size_t piece = 0;
};

struct OmegaCurvature {
  ExtRat sigma, sigma_hat, d2delta;
};

class OmegaContext {
 public:
  OmegaContext(PolyMap g, PolyMap b, ConvexPolyhedron p, Vec xbar, Vec dstar, bool use_fast_path = false)
      : g_(std::move(g)), b_(std::move(b)), gph_(std::move(p), use_fast_path), xbar_(std::move(xbar)),
        dstar_(std::move(dstar)) {
    n_ = xbar_.size();
    l_ = gph_.polyhedron().dim();
    require_dim(dstar_.size() == l_, "dbar* has wrong length");
    assumptions_ = check_basic_assumptions(g_, b_, gph_.polyhedron(), xbar_);
    m_ = b_.dim_out() / l_;
    gx_ = g_.eval(xbar_);
    if (!gph_member(gph_.polyhedron(), gx_, dstar_)) throw Error("dbar* is not normal to P at g(xbar)");
    if (!assumptions_.g_ok || !assumptions_.b_ok) throw Error("basic injectivity assumptions fail at xbar");
    jg_ = g_.jacobian(xbar_);
    bx_ = eval_matrix(b_, xbar_, l_, m_);
    jbd_ = Mat(m_, n_);
    // grad (b^T dbar*)(xbar): entry (j,k) = sum_i dbar*_i d b_ij / d x_k
    Mat jb = b_.jacobian(xbar_);
    for (std::size_t j = 0; j < m_; ++j)
      for (std::size_t k = 0; k < n_; ++k) {
        Rat s = 0;
        for (std::size_t i = 0; i < l_; ++i) s += dstar_[i] * jb(i * m_ + j, k);
        jbd_(j, k) = s;
      }
    tangent_ = gph_.tangent({gx_, dstar_});
  }

  const PolyMap& g() const { return g_; }
  const PolyMap& b() const { return b_; }
  std::size_t n() const { return n_; }
  std::size_t l() const { return l_; }
  std::size_t m() const { return m_; }
  const AssumptionReport& assumptions() const { return assumptions_; }
  const GphEngine& engine() const { return gph_; }
  const Vec& xbar() const { return xbar_; }
  const Vec& dstar() const { return dstar_; }
  GphPoint gph_point() const { return {gx_, dstar_}; }
  const ConeUnion& tangent_gph_pieces() const { return tangent_; }
  Vec omega_bar() const { return concat(xbar_, bx_.transpose() * dstar_); }
  const Mat& grad_g() const { return jg_; }
  const Mat& b_at() const { return bx_; }
  /// grad (b^T dbar*)(xbar), an m x n matrix.
  const Mat& grad_b_dstar() const { return jbd_; }

  /// T_Omega(omega_bar) as a union of cones in R^{n+m}: images of
  /// {(u, e*) : (grad g u, e*) in piece} under (u, e*) -> (u, grad(b^T d*) u + b^T e*).
  ConeUnion tangent_omega() const {
    Mat lift = lift_ue();
    Mat img = vstack(hstack(Mat::identity(n_), Mat(n_, l_)), hstack(jbd_, bx_.transpose()));
    std::vector<ConvexCone> out;
    for (const auto& k : tangent_.pieces()) out.push_back(k.preimage(lift).image(img));
    return ConeUnion(n_ + m_, std::move(out));
  }

  std::optional<TangentWitness> recover_ue(const Vec& eta) const {
    require_dim(eta.size() == n_ + m_, "tangent candidate has wrong length");
    Vec u = slice(eta, 0, n_);
    Vec rhs = slice(eta, n_, m_) - jbd_ * u;
    Vec gu = jg_ * u;
    Mat bt = bx_.transpose();
    std::optional<TangentWitness> found;
    for (std::size_t i = 0; i < tangent_.size(); ++i) {
      const auto& k = tangent_.pieces()[i];
      auto sol = solve_in_piece(k, gu, bt, rhs);
      if (!sol) continue;
      if (found && found->estar != *sol) throw ContractViolation("tangent witness is not unique across pieces");
      if (!found) found = TangentWitness{u, *sol, i};
    }
    return found;
  }

  /// N_Omega(omega_bar; eta) (limiting) or the regular normal cone of the
  /// tangent cone, as a union of cones in R^{n+m}.
  ConeUnion dir_normal_omega(const TangentWitness& w, NormalRegime regime) const {
    Mat lift = vstack(hstack(Mat::identity(l_), Mat(l_, m_)), hstack(Mat(l_, l_), bx_));
    Mat img = vstack(hstack(jg_.transpose(), Rat(-1) * jbd_.transpose()), hstack(Mat(m_, l_), Mat::identity(m_)));
    std::vector<ConvexCone> out;
    auto pieces = normal_pieces(w, regime);
    for (const auto& k : pieces.pieces()) out.push_back(k.preimage(lift).image(img));
    return ConeUnion(n_ + m_, std::move(out));
  }

  NormalResult recover_rf(const TangentWitness& w, const Vec& omega_star, NormalRegime regime) const {
    require_dim(omega_star.size() == n_ + m_, "normal candidate has wrong length");
    Vec mu = slice(omega_star, 0, n_);
    Vec r = slice(omega_star, n_, m_);
    Vec rhs = mu + jbd_.transpose() * r;
    NormalResult res;
    res.r = r;
    if (!solve_affine(jg_.transpose(), rhs)) {
      res.status = NormalResult::Status::NoDecomposition;
      return res;
    }
    Vec br = bx_ * r;
    auto pieces = normal_pieces(w, regime);
    std::optional<Vec> found;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      // f* with grad g^T f* = rhs and (f*, b r) in the piece
      const auto& k = pieces.pieces()[i];
      std::vector<HalfSpace> ineq, eq;
      for (const auto& f : k.facets()) ineq.push_back({slice(f, 0, l_), -dot(slice(f, l_, l_), br)});
      for (const auto& e : k.equalities()) eq.push_back({slice(e, 0, l_), -dot(slice(e, l_, l_), br)});
      Mat jt = jg_.transpose();
      for (std::size_t j = 0; j < n_; ++j) eq.push_back({jt.row(j), rhs[j]});
      auto s = ConvexPolyhedron::from_hrep(l_, ineq, eq);
      if (s.is_empty()) continue;
      auto v = s.vertices();
      if (v.size() != 1 || !s.rays().empty() || !s.lineality().empty())
        throw ContractViolation("normal witness f* is not unique");
      if (found && *found != v.front()) throw ContractViolation("normal witness differs across pieces");
      if (!found) {
        found = v.front();
        res.piece = i;
      }
    }
    if (found) {
      res.status = NormalResult::Status::Member;
      res.fstar = *found;
    }
    return res;
  }

  /// The constant part 2 (grad b u)^T e* + grad^2 b(u,u)^T dbar* of the
  /// second block of T^2_Omega.
  Vec second_order_shift(const TangentWitness& w) const {
    Mat db = directional_matrix(b_, xbar_, w.u, l_, m_);
    Mat hb = hessian_form_matrix(b_, xbar_, w.u, l_, m_);
    return Rat(2) * (db.transpose() * w.estar) + hb.transpose() * dstar_;
  }

  /// T^2_Omega(omega_bar; eta) as a union of polyhedra in R^{n+m}.
  PolyhedronUnion second_tangent_omega(const TangentWitness& w) const {
    auto t2 = gph_.second_tangent(gph_point(), {jg_ * w.u, w.estar});
    Vec c = concat(zeros(n_), second_order_shift(w));
    Vec q = concat(g_.hessian_form(xbar_, w.u), zeros(l_));
    Mat img = vstack(hstack(Mat::identity(n_), Mat(n_, l_)), hstack(jbd_, bx_.transpose()));
    std::vector<ConvexPolyhedron> out;
    for (const auto& k : t2.pieces())
      out.push_back(ConvexPolyhedron::from_cone(k).preimage(lift_ue(), q).image(img, c));
    auto u = PolyhedronUnion(n_ + m_, std::move(out));
    if (u.is_empty()) throw ContractViolation("second order tangent set of Omega is empty");
    return u;
  }

  /// Decomposes xi in T^2_Omega(omega_bar; eta) into (zeta, xi*).
  std::optional<SecondTangentWitness> recover_second(const TangentWitness& w, const Vec& xi) const {
    require_dim(xi.size() == n_ + m_, "second order candidate has wrong length");
    auto t2 = gph_.second_tangent(gph_point(), {jg_ * w.u, w.estar});
    Vec zeta = slice(xi, 0, n_);
    Vec rhs = slice(xi, n_, m_) - second_order_shift(w) - jbd_ * zeta;
    Vec first = jg_ * zeta + g_.hessian_form(xbar_, w.u);
    Mat bt = bx_.transpose();
    for (std::size_t i = 0; i < t2.size(); ++i)
      if (auto s = solve_in_piece(t2.pieces()[i], first, bt, rhs)) return SecondTangentWitness{zeta, *s, i};
    return std::nullopt;
  }

  /// Point of T^2_Omega built from zeta and xi*; the caller guarantees the
  /// membership of (grad g zeta + grad^2 g(u,u), xi*) in T^2_{gph N_P}.
  Vec second_tangent_point(const TangentWitness& w, const Vec& zeta, const Vec& xistar) const {
    return concat(zeta, second_order_shift(w) + jbd_ * zeta + bx_.transpose() * xistar);
  }

  /// <r, 2(grad b u)^T e* + grad^2 b(u,u)^T dbar*> - <f*, grad^2 g(u,u)>.
  Rat curvature_value(const TangentWitness& w, const Vec& r, const Vec& fstar) const {
    return dot(r, second_order_shift(w)) - dot(fstar, g_.hessian_form(xbar_, w.u));
  }

  OmegaCurvature curvature_omega(const TangentWitness& w, const Vec& omega_star) const {
    auto value = [&](NormalRegime regime) {
      auto res = recover_rf(w, omega_star, regime);
      if (res.status != NormalResult::Status::Member) return ExtRat::pos_inf();
      return ExtRat::finite(curvature_value(w, res.r, res.fstar));
    };
    OmegaCurvature c;
    c.sigma = value(NormalRegime::RegularOfTangent);
    c.sigma_hat = value(NormalRegime::Limiting);
    Vec eta = tangent_vector(w);
    int s = sgn(dot(omega_star, eta));
    c.d2delta = s > 0 ? ExtRat::neg_inf() : s < 0 ? ExtRat::pos_inf() : -c.sigma;
    return c;
  }

  /// eta = (u, grad(b^T d*) u + b^T e*).
  Vec tangent_vector(const TangentWitness& w) const { return concat(w.u, jbd_ * w.u + bx_.transpose() * w.estar); }

  ConeUnion normal_pieces(const TangentWitness& w, NormalRegime regime) const {
    GphDirection dir{jg_ * w.u, w.estar};
    if (regime == NormalRegime::Limiting) return gph_.dir_normal(gph_point(), dir);
    return ConeUnion(2 * l_, {gph_.regular_normal_of_tangent(gph_point(), dir)});
  }

 private:
  /// (u, e*) -> (grad g u, e*).
  Mat lift_ue() const { return vstack(hstack(jg_, Mat(l_, l_)), hstack(Mat(l_, n_), Mat::identity(l_))); }

  /// The unique y with (a, y) in k and m y = rhs, if any.
  std::optional<Vec> solve_in_piece(const ConvexCone& k, const Vec& a, const Mat& m, const Vec& rhs) const {
    std::vector<HalfSpace> ineq, eq;
    for (const auto& f : k.facets()) ineq.push_back({slice(f, l_, l_), -dot(slice(f, 0, l_), a)});
    for (const auto& e : k.equalities()) eq.push_back({slice(e, l_, l_), -dot(slice(e, 0, l_), a)});
    for (std::size_t j = 0; j < m.rows(); ++j) eq.push_back({m.row(j), rhs[j]});
    auto s = ConvexPolyhedron::from_hrep(l_, ineq, eq);
    if (s.is_empty()) return std::nullopt;
    auto v = s.vertices();
    if (v.size() != 1 || !s.rays().empty() || !s.lineality().empty())
      throw ContractViolation("linear recovery is not unique within a piece");
    return v.front();
  }

  PolyMap g_, b_;
  GphEngine gph_;
  Vec xbar_, dstar_, gx_;
  std::size_t n_ = 0, l_ = 0, m_ = 0;
  AssumptionReport assumptions_;
  Mat jg_, bx_, jbd_;
  ConeUnion tangent_;
};

}  // namespace gepsoc
