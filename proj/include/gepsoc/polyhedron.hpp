#pragma once

// Convex polyhedra {x : A x <= a, E x = e}, stored through the closed cone
// {(x,t) : A x <= a t, E x = e t, t >= 0}, which is canonical for nonempty
// sets and carries vertices (t > 0) and recession directions (t = 0).

#include <gepsoc/cone.hpp>

#include <optional>
#include <utility>

namespace gepsoc {

struct HalfSpace {
  Vec normal;
  Rat rhs;  // normal . x <= rhs
};

struct LinearOptimum {
  enum class Status { Empty, Unbounded, Optimal };
  Status status = Status::Empty;
  Rat value;
  Vec point;  // an optimal vertex or point of the minimal face
  Vec ray;    // improving direction when unbounded
};

class ConvexPolyhedron {
 public:
  ConvexPolyhedron() = default;

  static ConvexPolyhedron from_hrep(std::size_t dim, const std::vector<HalfSpace>& ineq,
                                    const std::vector<HalfSpace>& eq = {}) {
    std::vector<Vec> hi, he;
    for (const auto& h : ineq) {
      require_dim(h.normal.size() == dim, "polyhedron inequality has wrong length");
      hi.push_back(concat(h.normal, Vec{-h.rhs}));
    }
    for (const auto& h : eq) {
      require_dim(h.normal.size() == dim, "polyhedron equality has wrong length");
      he.push_back(concat(h.normal, Vec{-h.rhs}));
    }
    Vec t = zeros(dim + 1);
    t[dim] = -1;
    hi.push_back(t);
    return from_homogenization(dim, ConvexCone::from_hrep(dim + 1, hi, he));
  }

  /// {x : A x <= a}.
  static ConvexPolyhedron from_matrix(const Mat& a, const Vec& rhs) {
    require_dim(a.rows() == rhs.size(), "polyhedron: rhs length mismatch");
    std::vector<HalfSpace> h;
    for (std::size_t i = 0; i < a.rows(); ++i) h.push_back({a.row(i), rhs[i]});
    return from_hrep(a.cols(), h);
  }

  static ConvexPolyhedron from_vrep(std::size_t dim, const std::vector<Vec>& vertices, const std::vector<Vec>& rays = {},
                                    const std::vector<Vec>& lineality = {}) {
    if (vertices.empty()) return empty(dim);
    std::vector<Vec> r, l;
    for (const auto& v : vertices) {
      require_dim(v.size() == dim, "polyhedron vertex has wrong length");
      r.push_back(concat(v, Vec{Rat(1)}));
    }
    for (const auto& x : rays) r.push_back(concat(x, Vec{Rat(0)}));
    for (const auto& x : lineality) l.push_back(concat(x, Vec{Rat(0)}));
    return from_homogenization(dim, ConvexCone::from_vrep(dim + 1, r, l));
  }

  static ConvexPolyhedron from_cone(const ConvexCone& c) {
    return from_vrep(c.dim(), {zeros(c.dim())}, c.rays(), c.lineality());
  }
  static ConvexPolyhedron point(const Vec& p) { return from_vrep(p.size(), {p}); }
  static ConvexPolyhedron full(std::size_t dim) { return from_hrep(dim, {}); }
  static ConvexPolyhedron empty(std::size_t dim) {
    ConvexPolyhedron p;
    p.dim_ = dim;
    p.empty_ = true;
    p.hcone_ = ConvexCone::zero(dim + 1);
    return p;
  }

  std::size_t dim() const { return dim_; }
  bool is_empty() const { return empty_; }
  const ConvexCone& homogenization() const { return hcone_; }

  std::vector<HalfSpace> inequalities() const {
    std::vector<HalfSpace> out;
    if (empty_) return out;
    for (const auto& f : hcone_.facets()) {
      Vec n = slice(f, 0, dim_);
      if (gepsoc::is_zero(n)) continue;  // t >= 0
      out.push_back({n, -f[dim_]});
    }
    return out;
  }
  std::vector<HalfSpace> equalities() const {
    std::vector<HalfSpace> out;
    if (empty_) return out;
    for (const auto& e : hcone_.equalities()) out.push_back({slice(e, 0, dim_), -e[dim_]});
    return out;
  }
  std::vector<Vec> vertices() const {
    std::vector<Vec> out;
    if (empty_) return out;
    for (const auto& r : hcone_.rays())
      if (sgn(r[dim_]) > 0) {
        Vec v = slice(r, 0, dim_);
        Rat t = r[dim_];
        for (auto& x : v) x /= t;
        out.push_back(std::move(v));
      }
    return out;
  }
  std::vector<Vec> rays() const {
    std::vector<Vec> out;
    if (empty_) return out;
    for (const auto& r : hcone_.rays())
      if (sgn(r[dim_]) == 0) out.push_back(slice(r, 0, dim_));
    return out;
  }
  std::vector<Vec> lineality() const {
    std::vector<Vec> out;
    if (empty_) return out;
    for (const auto& l : hcone_.lineality()) out.push_back(slice(l, 0, dim_));
    return out;
  }

  ConvexCone recession_cone() const {
    if (empty_) return ConvexCone::zero(dim_);
    return ConvexCone::from_vrep(dim_, rays(), lineality());
  }

  bool is_cone() const {
    if (empty_) return false;
    auto v = vertices();
    return v.size() == 1 && gepsoc::is_zero(v.front());
  }
  /// The polyhedron viewed as a cone; requires is_cone().
  ConvexCone as_cone() const {
    if (!is_cone()) throw Error("polyhedron is not a cone");
    return recession_cone();
  }

  /// Dimension of the affine hull (-1 for the empty set).
  long affine_dim() const { return empty_ ? -1 : static_cast<long>(hcone_.cone_dim()) - 1; }

  bool contains(const Vec& x) const {
    require_dim(x.size() == dim_, "polyhedron membership: dimension mismatch");
    if (empty_) return false;
    return hcone_.contains(concat(x, Vec{Rat(1)}));
  }
  bool contains(const ConvexPolyhedron& o) const {
    require_dim(o.dim_ == dim_, "polyhedron inclusion: dimension mismatch");
    if (o.empty_) return true;
    if (empty_) return false;
    return hcone_.contains(o.hcone_);
  }

  Vec relint_point() const {
    if (empty_) throw Error("empty polyhedron has no relative interior point");
    auto vs = vertices();
    Vec p = zeros(dim_);
    for (const auto& v : vs) p = p + v;
    p = Rat(1, vs.size()) * p;
    for (const auto& r : rays()) p = p + r;
    return p;
  }

  ConvexPolyhedron intersect(const ConvexPolyhedron& o) const {
    require_dim(o.dim_ == dim_, "polyhedron intersection: dimension mismatch");
    if (empty_ || o.empty_) return empty(dim_);
    return from_homogenization(dim_, hcone_.intersect(o.hcone_));
  }
  ConvexPolyhedron with_inequality(const Vec& h, const Rat& c) const {
    if (empty_) return *this;
    return from_homogenization(dim_, hcone_.with_inequality(concat(h, Vec{-c})));
  }
  ConvexPolyhedron with_equality(const Vec& h, const Rat& c) const {
    if (empty_) return *this;
    return from_homogenization(dim_, hcone_.with_equality(concat(h, Vec{-c})));
  }

  /// {x : M x + c in this}.
  ConvexPolyhedron preimage(const Mat& m, const Vec& c) const {
    require_dim(m.rows() == dim_ && c.size() == dim_, "polyhedron preimage: dimension mismatch");
    if (empty_) return empty(m.cols());
    Mat mt = m.transpose();
    std::vector<HalfSpace> ineq, eq;
    for (const auto& h : inequalities()) ineq.push_back({mt * h.normal, h.rhs - dot(h.normal, c)});
    for (const auto& h : equalities()) eq.push_back({mt * h.normal, h.rhs - dot(h.normal, c)});
    return from_hrep(m.cols(), ineq, eq);
  }

  /// {M x + c : x in this}.
  ConvexPolyhedron image(const Mat& m, const Vec& c) const {
    require_dim(m.cols() == dim_ && c.size() == m.rows(), "polyhedron image: dimension mismatch");
    if (empty_) return empty(m.rows());
    std::vector<Vec> v, r, l;
    for (const auto& x : vertices()) v.push_back(m * x + c);
    for (const auto& x : rays()) r.push_back(m * x);
    for (const auto& x : lineality()) l.push_back(m * x);
    return from_vrep(m.rows(), v, r, l);
  }

  ConvexPolyhedron product(const ConvexPolyhedron& o) const {
    if (empty_ || o.empty_) return empty(dim_ + o.dim_);
    std::vector<HalfSpace> ineq, eq;
    for (const auto& h : inequalities()) ineq.push_back({concat(h.normal, zeros(o.dim_)), h.rhs});
    for (const auto& h : o.inequalities()) ineq.push_back({concat(zeros(dim_), h.normal), h.rhs});
    for (const auto& h : equalities()) eq.push_back({concat(h.normal, zeros(o.dim_)), h.rhs});
    for (const auto& h : o.equalities()) eq.push_back({concat(zeros(dim_), h.normal), h.rhs});
    return from_hrep(dim_ + o.dim_, ineq, eq);
  }

  /// T_P(x) = {u : A_I u <= 0, E u = 0} over the active rows I.
  ConvexCone tangent_at(const Vec& x) const {
    if (!contains(x)) throw Error("tangent cone requested at a point outside the polyhedron");
    std::vector<Vec> act, eq;
    for (const auto& h : inequalities())
      if (dot(h.normal, x) == h.rhs) act.push_back(h.normal);
    for (const auto& h : equalities()) eq.push_back(h.normal);
    return ConvexCone::from_hrep(dim_, act, eq);
  }
  ConvexCone normal_at(const Vec& x) const { return tangent_at(x).polar(); }
  ConvexCone critical_at(const Vec& x, const Vec& xstar) const {
    auto t = tangent_at(x);
    if (!t.polar().contains(xstar)) throw Error("critical cone: covector is not normal at the point");
    return t.with_equality(xstar);
  }

  /// Whether some point has h.x > c.
  bool exceeds(const Vec& h, const Rat& c) const {
    auto opt = maximize(h);
    return opt.status == LinearOptimum::Status::Unbounded ||
           (opt.status == LinearOptimum::Status::Optimal && opt.value > c);
  }

  /// Maximizes obj.x by inspecting the generators.
  LinearOptimum maximize(const Vec& obj) const {
    require_dim(obj.size() == dim_, "maximize: objective length mismatch");
    LinearOptimum out;
    if (empty_) return out;
    for (const auto& l : lineality())
      if (sgn(dot(obj, l)) != 0) {
        out.status = LinearOptimum::Status::Unbounded;
        out.ray = sgn(dot(obj, l)) > 0 ? l : -l;
        return out;
      }
    for (const auto& r : rays())
      if (sgn(dot(obj, r)) > 0) {
        out.status = LinearOptimum::Status::Unbounded;
        out.ray = r;
        return out;
      }
    out.status = LinearOptimum::Status::Optimal;
    bool first = true;
    for (const auto& v : vertices()) {
      Rat val = dot(obj, v);
      if (first || val > out.value) {
        out.value = val;
        out.point = v;
        first = false;
      }
    }
    return out;
  }

  bool operator==(const ConvexPolyhedron& o) const {
    return dim_ == o.dim_ && empty_ == o.empty_ && hcone_ == o.hcone_;
  }
  bool operator!=(const ConvexPolyhedron& o) const { return !(*this == o); }
  bool operator<(const ConvexPolyhedron& o) const {
    if (dim_ != o.dim_) return dim_ < o.dim_;
    if (empty_ != o.empty_) return empty_;
    return hcone_ < o.hcone_;
  }

  std::string str() const {
    if (empty_) return "polyhedron{empty}";
    std::string s = "polyhedron{vertices:";
    for (const auto& v : vertices()) s += to_string(v);
    s += " rays:";
    for (const auto& r : rays()) s += to_string(r);
    s += " lin:";
    for (const auto& l : lineality()) s += to_string(l);
    return s + "}";
  }

 private:
  static ConvexPolyhedron from_homogenization(std::size_t dim, ConvexCone h) {
    bool any = false;
    for (const auto& r : h.rays())
      if (sgn(r[dim]) > 0) any = true;
    if (!any) return empty(dim);
    ConvexPolyhedron p;
    p.dim_ = dim;
    p.hcone_ = std::move(h);
    return p;
  }

  std::size_t dim_ = 0;
  bool empty_ = false;
  ConvexCone hcone_;
};

/// Nonpositive orthant R^l_- as a polyhedron.
inline ConvexPolyhedron nonpositive_orthant(std::size_t l) {
  std::vector<HalfSpace> h;
  for (std::size_t i = 0; i < l; ++i) h.push_back({unit(l, i), Rat(0)});
  return ConvexPolyhedron::from_hrep(l, h);
}

/// Whether P is exactly R^l_- (enables the coordinatewise tables).
inline bool is_nonpositive_orthant(const ConvexPolyhedron& p) { return p == nonpositive_orthant(p.dim()); }

}  // namespace gepsoc
