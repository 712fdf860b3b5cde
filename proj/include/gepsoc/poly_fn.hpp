#pragma once

// Sparse multivariate polynomials with rational coefficients and polynomial
// maps R^n -> R^d. Derivatives are exact; a double "shadow" evaluation exists
// for oracles only.

#include <gepsoc/rational.hpp>

#include <cmath>
#include <map>
#include <vector>

namespace gepsoc {

using Exponents = std::vector<unsigned>;

struct Monomial {
  Rat coeff;
  Exponents exps;
};

/// A polynomial in `nvars` variables. Terms are kept sorted by exponent vector
/// (lexicographic), with duplicates merged and zero coefficients dropped.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}
  Polynomial(std::size_t nvars, const std::vector<Monomial>& terms) : nvars_(nvars) {
    for (const auto& t : terms) {
      require_dim(t.exps.size() == nvars, "monomial exponent length differs from variable count");
      terms_[t.exps] += t.coeff;
    }
    prune();
  }

  static Polynomial constant(std::size_t nvars, const Rat& c) {
    return Polynomial(nvars, {Monomial{c, Exponents(nvars, 0)}});
  }
  static Polynomial monomial(std::size_t nvars, const Rat& c, const Exponents& e) {
    return Polynomial(nvars, {Monomial{c, e}});
  }
  static Polynomial variable(std::size_t nvars, std::size_t i) {
    Exponents e(nvars, 0);
    e.at(i) = 1;
    return Polynomial(nvars, {Monomial{Rat(1), e}});
  }

  std::size_t nvars() const { return nvars_; }
  std::vector<Monomial> terms() const {
    std::vector<Monomial> out;
    for (const auto& [e, c] : terms_) out.push_back({c, e});
    return out;
  }
  bool is_zero() const { return terms_.empty(); }
  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) {
      unsigned s = 0;
      for (auto k : e) s += k;
      d = std::max(d, s);
    }
    return d;
  }

  Rat eval(const Vec& z) const {
    require_dim(z.size() == nvars_, "polynomial eval: point dimension mismatch");
    Rat s = 0;
    for (const auto& [e, c] : terms_) {
      Rat m = c;
      for (std::size_t i = 0; i < nvars_ && sgn(m) != 0; ++i) {
        if (e[i] == 0) continue;
        Rat p;
        mpz_pow_ui(p.get_num_mpz_t(), z[i].get_num_mpz_t(), e[i]);
        mpz_pow_ui(p.get_den_mpz_t(), z[i].get_den_mpz_t(), e[i]);
        m *= p;
      }
      s += m;
    }
    return s;
  }

  template <class Real>
  Real eval_shadow(const std::vector<Real>& z) const {
    require_dim(z.size() == nvars_, "polynomial eval: point dimension mismatch");
    Real s = 0;
    for (const auto& [e, c] : terms_) {
      Real m = static_cast<Real>(c.get_d());
      for (std::size_t i = 0; i < nvars_; ++i)
        for (unsigned k = 0; k < e[i]; ++k) m *= z[i];
      s += m;
    }
    return s;
  }

  Polynomial partial(std::size_t var) const {
    require_dim(var < nvars_, "partial: variable index out of range");
    Polynomial d(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponents f = e;
      f[var] -= 1;
      d.terms_[f] += c * e[var];
    }
    d.prune();
    return d;
  }

  Polynomial operator+(const Polynomial& o) const {
    require_dim(nvars_ == o.nvars_, "polynomial add: variable count mismatch");
    Polynomial r = *this;
    for (const auto& [e, c] : o.terms_) r.terms_[e] += c;
    r.prune();
    return r;
  }
  Polynomial operator-(const Polynomial& o) const { return *this + o.scaled(Rat(-1)); }
  Polynomial operator*(const Polynomial& o) const {
    require_dim(nvars_ == o.nvars_, "polynomial mul: variable count mismatch");
    Polynomial r(nvars_);
    for (const auto& [e1, c1] : terms_)
      for (const auto& [e2, c2] : o.terms_) {
        Exponents e(nvars_);
        for (std::size_t i = 0; i < nvars_; ++i) e[i] = e1[i] + e2[i];
        r.terms_[e] += c1 * c2;
      }
    r.prune();
    return r;
  }
  Polynomial scaled(const Rat& s) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_[e] = c * s;
    r.prune();
    return r;
  }

  /// Substitutes polynomial `subs[i]` (all in a common variable set) for
  /// variable i.
  Polynomial compose(const std::vector<Polynomial>& subs) const {
    require_dim(subs.size() == nvars_, "compose: substitution count mismatch");
    std::size_t out_vars = subs.empty() ? 0 : subs.front().nvars();
    Polynomial r(out_vars);
    for (const auto& [e, c] : terms_) {
      Polynomial m = constant(out_vars, c);
      for (std::size_t i = 0; i < nvars_; ++i)
        for (unsigned k = 0; k < e[i]; ++k) m = m * subs[i];
      r = r + m;
    }
    return r;
  }

  bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

 private:
  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = sgn(it->second) == 0 ? terms_.erase(it) : std::next(it);
  }

  std::size_t nvars_ = 0;
  std::map<Exponents, Rat> terms_;
};

/// Polynomial map R^dim_in -> R^dim_out.
class PolyMap {
 public:
  PolyMap() = default;
  PolyMap(std::size_t dim_in, std::vector<Polynomial> components)
      : dim_in_(dim_in), comps_(std::move(components)) {
    for (const auto& c : comps_) require_dim(c.nvars() == dim_in_, "PolyMap component has wrong variable count");
  }

  /// x -> A x + c.
  static PolyMap affine(const Mat& a, const Vec& c) {
    require_dim(c.size() == a.rows(), "affine map: offset length mismatch");
    std::vector<Polynomial> comps;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      Polynomial p = Polynomial::constant(a.cols(), c[i]);
      for (std::size_t j = 0; j < a.cols(); ++j)
        if (sgn(a(i, j)) != 0) p = p + Polynomial::variable(a.cols(), j).scaled(a(i, j));
      comps.push_back(std::move(p));
    }
    return PolyMap(a.cols(), std::move(comps));
  }
  static PolyMap constant(std::size_t dim_in, const Vec& c) { return affine(Mat(c.size(), dim_in), c); }
  static PolyMap identity(std::size_t n) { return affine(Mat::identity(n), zeros(n)); }

  std::size_t dim_in() const { return dim_in_; }
  std::size_t dim_out() const { return comps_.size(); }
  const std::vector<Polynomial>& components() const& { return comps_; }
  std::vector<Polynomial> components() && { return std::move(comps_); }
  const Polynomial& operator[](std::size_t i) const { return comps_.at(i); }

  Vec eval(const Vec& z) const {
    require_dim(z.size() == dim_in_, "eval: point dimension mismatch");
    Vec out;
    out.reserve(comps_.size());
    for (const auto& c : comps_) out.push_back(c.eval(z));
    return out;
  }

  template <class Real>
  std::vector<Real> eval_shadow(const std::vector<Real>& z) const {
    std::vector<Real> out;
    out.reserve(comps_.size());
    for (const auto& c : comps_) out.push_back(c.eval_shadow(z));
    return out;
  }

  Mat jacobian(const Vec& z) const {
    require_dim(z.size() == dim_in_, "jacobian: point dimension mismatch");
    Mat j(comps_.size(), dim_in_);
    for (std::size_t i = 0; i < comps_.size(); ++i)
      for (std::size_t k = 0; k < dim_in_; ++k) j(i, k) = comps_[i].partial(k).eval(z);
    return j;
  }

  /// Hessian matrix of component i at z.
  Mat hessian(std::size_t i, const Vec& z) const {
    require_dim(z.size() == dim_in_, "hessian: point dimension mismatch");
    Mat h(dim_in_, dim_in_);
    for (std::size_t a = 0; a < dim_in_; ++a) {
      Polynomial da = comps_.at(i).partial(a);
      for (std::size_t b = a; b < dim_in_; ++b) {
        h(a, b) = da.partial(b).eval(z);
        h(b, a) = h(a, b);
      }
    }
    return h;
  }

  /// (w^T H_1(z) w, ..., w^T H_d(z) w).
  Vec hessian_form(const Vec& z, const Vec& w) const {
    require_dim(z.size() == dim_in_ && w.size() == dim_in_, "hessian_form: dimension mismatch");
    Vec out;
    for (std::size_t i = 0; i < comps_.size(); ++i) out.push_back(dot(w, hessian(i, z) * w));
    return out;
  }

  /// Componentwise partial derivative with respect to variable k.
  PolyMap partial(std::size_t k) const {
    std::vector<Polynomial> d;
    for (const auto& c : comps_) d.push_back(c.partial(k));
    return PolyMap(dim_in_, std::move(d));
  }

  PolyMap compose(const PolyMap& inner) const {
    require_dim(inner.dim_out() == dim_in_, "compose: inner map output dimension mismatch");
    std::vector<Polynomial> out;
    for (const auto& c : comps_) out.push_back(c.compose(inner.comps_));
    return PolyMap(inner.dim_in(), std::move(out));
  }

  /// Components [from, from+len).
  PolyMap slice(std::size_t from, std::size_t len) const {
    require_dim(from + len <= comps_.size(), "PolyMap slice out of range");
    return PolyMap(dim_in_, std::vector<Polynomial>(comps_.begin() + static_cast<std::ptrdiff_t>(from),
                                                    comps_.begin() + static_cast<std::ptrdiff_t>(from + len)));
  }

  PolyMap stacked(const PolyMap& below) const {
    require_dim(below.dim_in_ == dim_in_, "stack: input dimension mismatch");
    auto c = comps_;
    c.insert(c.end(), below.comps_.begin(), below.comps_.end());
    return PolyMap(dim_in_, std::move(c));
  }

  bool operator==(const PolyMap& o) const { return dim_in_ == o.dim_in_ && comps_ == o.comps_; }

 private:
  std::size_t dim_in_ = 0;
  std::vector<Polynomial> comps_;
};

/// Views a PolyMap with rows*cols components as a row-major matrix function
/// and evaluates it, e.g. b(x) in R^{l x m}.
inline Mat eval_matrix(const PolyMap& p, const Vec& z, std::size_t rows, std::size_t cols) {
  require_dim(p.dim_out() == rows * cols, "matrix-valued map has wrong component count");
  Vec v = p.eval(z);
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
  return m;
}

/// Directional derivative (sum_k w_k d/dx_k) of a matrix-valued map.
inline Mat directional_matrix(const PolyMap& p, const Vec& z, const Vec& w, std::size_t rows, std::size_t cols) {
  Mat jac = p.jacobian(z);
  Vec d = jac * w;
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = d[i * cols + j];
  return m;
}

/// Second directional derivative w^T (nabla^2 p_ij) w of a matrix-valued map.
inline Mat hessian_form_matrix(const PolyMap& p, const Vec& z, const Vec& w, std::size_t rows, std::size_t cols) {
  Vec h = p.hessian_form(z, w);
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = h[i * cols + j];
  return m;
}

}  // namespace gepsoc
