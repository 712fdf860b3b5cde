#pragma once

// Exact rational scalars, vectors and dense matrices, with the small set of
// elimination routines (rank, kernel, affine solve) every higher module uses.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gepsoc {

using Rat = mpq_class;
using Vec = std::vector<Rat>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A property the theory guarantees failed to hold at runtime.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

inline void require_dim(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}
inline void require_dim(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

/// n/d in lowest terms (mpq_class(n, d) alone does not canonicalize).
inline Rat ratio(long n, long d) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

/// Parses "p", "-p" or "p/q" (integers only). Decimal and exponent forms are
/// rejected so that no float can leak into exact data.
inline Rat parse_rat(std::string_view s) {
  auto is_int = [](std::string_view t) {
    if (!t.empty() && (t.front() == '-' || t.front() == '+')) t.remove_prefix(1);
    return !t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  auto slash = s.find('/');
  std::string_view num = s.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : s.substr(slash + 1);
  if (!is_int(num) || !is_int(den) || den.front() == '-' || den.front() == '+')
    throw Error("not an exact rational literal: '" + std::string(s) + "'");
  std::string n(num);
  if (n.front() == '+') n.erase(0, 1);
  mpz_class zn(n), zd{std::string(den)};
  if (zd == 0) throw Error("zero denominator in '" + std::string(s) + "'");
  Rat r(zn, zd);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rat& r) { return r.get_str(); }

inline std::string to_string(const Vec& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i].get_str();
  }
  return out + ")";
}

inline Vec zeros(std::size_t n) { return Vec(n, Rat(0)); }

inline Vec unit(std::size_t n, std::size_t i) {
  Vec v = zeros(n);
  v[i] = 1;
  return v;
}

inline bool is_zero(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](const Rat& x) { return sgn(x) == 0; });
}

inline Rat dot(const Vec& a, const Vec& b) {
  require_dim(a.size() == b.size(), "dot: length mismatch");
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (sgn(a[i]) != 0 && sgn(b[i]) != 0) s += a[i] * b[i];
  return s;
}

inline Vec operator+(const Vec& a, const Vec& b) {
  require_dim(a.size() == b.size(), "vector add: length mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  require_dim(a.size() == b.size(), "vector sub: length mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator-(const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

inline Vec operator*(const Rat& s, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline Vec concat(const Vec& a, const Vec& b) {
  Vec r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

inline Vec slice(const Vec& a, std::size_t from, std::size_t len) {
  require_dim(from + len <= a.size(), "slice out of range");
  return Vec(a.begin() + static_cast<std::ptrdiff_t>(from), a.begin() + static_cast<std::ptrdiff_t>(from + len));
}

/// Scales a nonzero vector by a positive factor to the primitive integer
/// vector on its ray. Zero stays zero.
inline Vec primitive(const Vec& v) {
  mpz_class l = 1, g = 0;
  for (const auto& x : v) {
    if (sgn(x) == 0) continue;
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  }
  std::vector<mpz_class> ints(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    mpz_class num = v[i].get_num() * (l / v[i].get_den());
    ints[i] = num;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
  }
  if (g == 0) return v;
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = Rat(ints[i] / g);
  return r;
}

inline bool lex_less(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    int c = cmp(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return false;
}

/// Dense row-major rational matrix.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Rat(0)) {}

  static Mat from_rows(const std::vector<Vec>& rows, std::size_t cols) {
    Mat m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require_dim(rows[i].size() == cols, "matrix row length mismatch");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rat& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rat& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vec row(std::size_t i) const {
    return Vec(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
               data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }
  Vec col(std::size_t j) const {
    Vec c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  std::vector<Vec> row_list() const {
    std::vector<Vec> out;
    out.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out.push_back(row(i));
    return out;
  }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Vec operator*(const Vec& v) const {
    require_dim(v.size() == cols_, "matrix-vector: length mismatch");
    Vec r(rows_, Rat(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (sgn(v[j]) != 0) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  Mat operator*(const Mat& o) const {
    require_dim(cols_ == o.rows_, "matrix-matrix: inner dimension mismatch");
    Mat r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Rat& a = (*this)(i, k);
        if (sgn(a) == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }

  bool operator==(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rat> data_;
};

inline Mat operator*(const Rat& s, const Mat& a) {
  Mat r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
  return r;
}

inline Mat operator+(const Mat& a, const Mat& b) {
  require_dim(a.rows() == b.rows() && a.cols() == b.cols(), "matrix sum: shape mismatch");
  Mat r = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) += b(i, j);
  return r;
}

inline Mat hstack(const Mat& a, const Mat& b) {
  require_dim(a.rows() == b.rows(), "hstack: row mismatch");
  Mat r(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) r(i, a.cols() + j) = b(i, j);
  }
  return r;
}

inline Mat vstack(const Mat& a, const Mat& b) {
  require_dim(a.cols() == b.cols() || a.rows() == 0 || b.rows() == 0, "vstack: column mismatch");
  std::size_t cols = a.rows() ? a.cols() : b.cols();
  Mat r(a.rows() + b.rows(), cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < cols; ++j) r(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < cols; ++j) r(a.rows() + i, j) = b(i, j);
  return r;
}

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref_in_place(Mat& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && sgn(m(p, c)) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    Rat inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || sgn(m(i, c)) == 0) continue;
      Rat f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(Mat m) { return rref_in_place(m).size(); }

inline std::size_t rank_of_rows(const std::vector<Vec>& rows, std::size_t cols) {
  if (rows.empty()) return 0;
  return rank(Mat::from_rows(rows, cols));
}

/// Canonical basis (RREF rows) of the span of the given vectors.
inline std::vector<Vec> span_basis(const std::vector<Vec>& vecs, std::size_t dim) {
  if (vecs.empty()) return {};
  Mat m = Mat::from_rows(vecs, dim);
  auto piv = rref_in_place(m);
  std::vector<Vec> out;
  for (std::size_t i = 0; i < piv.size(); ++i) out.push_back(m.row(i));
  return out;
}

/// Basis of {x : M x = 0}.
inline std::vector<Vec> kernel(const Mat& m) {
  Mat r = m;
  auto piv = rref_in_place(r);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : piv) is_pivot[c] = true;
  std::vector<Vec> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    Vec v = zeros(m.cols());
    v[f] = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -r(i, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Affine solution set {x : M x = rhs} as particular solution plus kernel.
struct AffineSolution {
  Vec particular;
  std::vector<Vec> kernel;
};

inline std::optional<AffineSolution> solve_affine(const Mat& m, const Vec& rhs) {
  require_dim(rhs.size() == m.rows(), "solve: rhs length mismatch");
  Mat aug(m.rows(), m.cols() + 1);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = rhs[i];
  }
  auto piv = rref_in_place(aug);
  if (!piv.empty() && piv.back() == m.cols()) return std::nullopt;
  Vec x = zeros(m.cols());
  for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = aug(i, m.cols());
  return AffineSolution{std::move(x), kernel(m)};
}

/// Orthogonal projection onto the complement of span(basis).
inline Vec project_out(const Vec& v, const std::vector<Vec>& basis) {
  if (basis.empty()) return v;
  std::size_t k = basis.size();
  Mat gram(k, k);
  Vec rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) gram(i, j) = dot(basis[i], basis[j]);
    rhs[i] = dot(basis[i], v);
  }
  auto sol = solve_affine(gram, rhs);
  Vec out = v;
  for (std::size_t i = 0; i < k; ++i)
    if (sgn(sol->particular[i]) != 0) out = out - sol->particular[i] * basis[i];
  return out;
}

/// Extended reals over Rat: finite, +inf or -inf. Infinities are tags, never
/// sentinel magnitudes.
struct ExtRat {
  enum class Kind { Finite, PosInf, NegInf };
  Kind kind = Kind::Finite;
  Rat value = 0;

  static ExtRat finite(Rat v) { return {Kind::Finite, std::move(v)}; }
  static ExtRat pos_inf() { return {Kind::PosInf, 0}; }
  static ExtRat neg_inf() { return {Kind::NegInf, 0}; }

  bool is_finite() const { return kind == Kind::Finite; }
  ExtRat operator-() const {
    switch (kind) {
      case Kind::PosInf: return neg_inf();
      case Kind::NegInf: return pos_inf();
      default: return finite(-value);
    }
  }
  friend bool operator<=(const ExtRat& a, const ExtRat& b) {
    if (a.kind == Kind::NegInf || b.kind == Kind::PosInf) return true;
    if (a.kind == Kind::PosInf || b.kind == Kind::NegInf) return false;
    return a.value <= b.value;
  }
  friend bool operator==(const ExtRat& a, const ExtRat& b) {
    return a.kind == b.kind && (a.kind != Kind::Finite || a.value == b.value);
  }
  std::string str() const {
    switch (kind) {
      case Kind::PosInf: return "+inf";
      case Kind::NegInf: return "-inf";
      default: return value.get_str();
    }
  }
};

inline double to_double(const Rat& r) { return r.get_d(); }

inline std::vector<double> to_double(const Vec& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_d();
  return out;
}

}  // namespace gepsoc
