#pragma once

// Floating-point falsifiers for the exact geometry. Sets are described by
// analytic charts through a reference point; all probing happens in
// coordinates centred at that point.

#include <gepsoc/optimality.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>

namespace gepsoc::oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Thresholds {
  double tangent = 1e-3;         // residual <= tangent * t at the smallest t
  double second_tangent = 1e-3;  // residual <= second_tangent * t^2
  double normal = 1e-4;          // approach distance relative to max(1, |z*|)
  double curvature = 1e-4;       // |estimate - exact| / (|u|^2 |z*|)
  double derivative = 1e-6;      // relative error of central differences
  int steps = 4;                 // t = 10^-1 .. 10^-steps
  double aperture = 0.1;         // rho of the directional neighborhood
  double radius = 1e-2;          // delta of the directional neighborhood
  int normal_trials = 300;
  int curvature_samples = 200;
  std::uint64_t seed = 1;
};

inline VectorXd to_eigen(const Vec& v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i].get_d();
  return out;
}

inline MatrixXd to_eigen(const Mat& m) {
  MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j).get_d();
  return out;
}

inline std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// A PolyMap with double coefficients, plus its partial derivatives.
class FloatMap {
 public:
  FloatMap() = default;
  explicit FloatMap(const PolyMap& p) : nin_(p.dim_in()) {
    for (const auto& c : p.components()) comps_.push_back(compile(c));
    partials_.resize(nin_);
    for (std::size_t k = 0; k < nin_; ++k)
      for (const auto& c : p.components()) partials_[k].push_back(compile(c.partial(k)));
  }

  std::size_t dim_in() const { return nin_; }
  std::size_t dim_out() const { return comps_.size(); }

  VectorXd eval(const VectorXd& s) const {
    VectorXd out(static_cast<Eigen::Index>(comps_.size()));
    for (std::size_t i = 0; i < comps_.size(); ++i) out[static_cast<Eigen::Index>(i)] = eval(comps_[i], s);
    return out;
  }

  MatrixXd jacobian(const VectorXd& s) const {
    MatrixXd j(static_cast<Eigen::Index>(comps_.size()), static_cast<Eigen::Index>(nin_));
    for (std::size_t k = 0; k < nin_; ++k)
      for (std::size_t i = 0; i < comps_.size(); ++i)
        j(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = eval(partials_[k][i], s);
    return j;
  }

 private:
  struct Term {
    double c;
    Exponents e;
  };
  using Poly = std::vector<Term>;

  static Poly compile(const Polynomial& p) {
    Poly out;
    for (const auto& t : p.terms()) out.push_back({t.coeff.get_d(), t.exps});
    return out;
  }
  static double eval(const Poly& p, const VectorXd& s) {
    double sum = 0;
    for (const auto& t : p) {
      double m = t.c;
      for (std::size_t i = 0; i < t.e.size(); ++i)
        for (unsigned k = 0; k < t.e[i]; ++k) m *= s[static_cast<Eigen::Index>(i)];
      sum += m;
    }
    return sum;
  }

  std::size_t nin_ = 0;
  std::vector<Poly> comps_;
  std::vector<std::vector<Poly>> partials_;
};

/// Polynomial map from a parameter box onto part of the set, with the
/// parameters of the reference point.
struct Chart {
  PolyMap map;
  std::vector<std::optional<Rat>> lo, hi;  // nullopt = unbounded
  Vec base;
};

struct Projection {
  VectorXd point;  // relative to the reference point
  double distance = 0;
  std::size_t chart = 0;
};

/// A union of chart images covering the set near a reference point.
class Parameterization {
 public:
  Parameterization(Vec reference, std::vector<Chart> charts) : ref_(std::move(reference)), charts_(std::move(charts)) {
    if (charts_.empty()) throw Error("parameterization needs at least one chart");
    for (const auto& c : charts_) {
      std::size_t k = c.map.dim_in();
      require_dim(c.map.dim_out() == ref_.size(), "chart maps into the wrong dimension");
      require_dim(c.lo.size() == k && c.hi.size() == k && c.base.size() == k, "chart box has wrong length");
      for (std::size_t i = 0; i < k; ++i)
        if ((c.lo[i] && c.base[i] < *c.lo[i]) || (c.hi[i] && *c.hi[i] < c.base[i]))
          throw Error("chart base lies outside its box");
      if (c.map.eval(c.base) != ref_) throw Error("chart does not pass through the reference point");
      local_.push_back(recentre(c));
    }
  }

  std::size_t dim() const { return ref_.size(); }
  const Vec& reference() const { return ref_; }
  const std::vector<Chart>& charts() const& { return charts_; }
  std::vector<Chart> charts() && { return std::move(charts_); }

  /// Nearest chart point to reference + q.
  Projection project(const VectorXd& q) const {
    Projection best{VectorXd::Zero(q.size()), q.norm(), 0};
    for (std::size_t i = 0; i < local_.size(); ++i) project_chart(local_[i], q, i, best);
    return best;
  }

  double distance(const VectorXd& q) const { return project(q).distance; }
  double distance_global(const Vec& y) const { return distance(to_eigen(y) - to_eigen(ref_)); }

 private:
  struct Local {
    FloatMap map;  // parameter offset -> point offset
    VectorXd lo, hi;
  };

  Local recentre(const Chart& c) const {
    std::size_t k = c.map.dim_in();
    auto shifted = c.map.compose(PolyMap::affine(Mat::identity(k), c.base));
    std::vector<Polynomial> comps;
    for (std::size_t i = 0; i < shifted.dim_out(); ++i)
      comps.push_back(shifted[i] - Polynomial::constant(k, ref_[i]));
    Local out{FloatMap(PolyMap(k, std::move(comps))), VectorXd(k), VectorXd(k)};
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      auto e = static_cast<Eigen::Index>(i);
      out.lo[e] = c.lo[i] ? Rat(*c.lo[i] - c.base[i]).get_d() : -inf;
      out.hi[e] = c.hi[i] ? Rat(*c.hi[i] - c.base[i]).get_d() : inf;
    }
    return out;
  }

  /// Enumerates the faces of the parameter box (each bounded coordinate free
  /// or pinned at a bound) and runs Gauss-Newton on the free coordinates.
  static void project_chart(const Local& c, const VectorXd& q, std::size_t index, Projection& best) {
    auto k = static_cast<Eigen::Index>(c.map.dim_in());
    std::vector<Eigen::Index> bounded;
    for (Eigen::Index i = 0; i < k; ++i)
      if (std::isfinite(c.lo[i]) || std::isfinite(c.hi[i])) bounded.push_back(i);
    std::size_t faces = 1;
    for (std::size_t i = 0; i < bounded.size(); ++i) faces *= 3;
    for (std::size_t f = 0; f < faces; ++f) {
      VectorXd s = VectorXd::Zero(k);
      std::vector<bool> pinned(static_cast<std::size_t>(k), false);
      bool valid = true;
      std::size_t code = f;
      for (auto i : bounded) {
        int state = static_cast<int>(code % 3);
        code /= 3;
        if (state == 0) continue;
        double v = state == 1 ? c.lo[i] : c.hi[i];
        if (!std::isfinite(v)) valid = false;
        s[i] = v;
        pinned[static_cast<std::size_t>(i)] = true;
      }
      if (!valid) continue;
      gauss_newton(c.map, q, pinned, s);
      bool inside = true;
      for (Eigen::Index i = 0; i < k; ++i) {
        double slack = 1e-12 * (1 + std::abs(s[i]));
        if (s[i] < c.lo[i] - slack || s[i] > c.hi[i] + slack) inside = false;
      }
      if (!inside) continue;
      // snap into the box so the point is a member, not a near member
      s = s.cwiseMax(c.lo).cwiseMin(c.hi);
      VectorXd y = c.map.eval(s);
      double d = (y - q).norm();
      if (d < best.distance) best = {y, d, index};
    }
  }

  static void gauss_newton(const FloatMap& map, const VectorXd& q, const std::vector<bool>& pinned, VectorXd& s) {
    std::vector<Eigen::Index> free;
    for (std::size_t i = 0; i < pinned.size(); ++i)
      if (!pinned[i]) free.push_back(static_cast<Eigen::Index>(i));
    if (free.empty()) return;
    VectorXd r = map.eval(s) - q;
    for (int it = 0; it < 100; ++it) {
      MatrixXd jfull = map.jacobian(s);
      MatrixXd j(jfull.rows(), static_cast<Eigen::Index>(free.size()));
      for (std::size_t c = 0; c < free.size(); ++c) j.col(static_cast<Eigen::Index>(c)) = jfull.col(free[c]);
      VectorXd step = j.completeOrthogonalDecomposition().solve(-r);
      double lam = 1;
      bool moved = false;
      while (lam > 1e-10) {
        VectorXd t = s;
        for (std::size_t c = 0; c < free.size(); ++c) t[free[c]] += lam * step[static_cast<Eigen::Index>(c)];
        VectorXd rt = map.eval(t) - q;
        if (rt.squaredNorm() < r.squaredNorm()) {
          s = t;
          r = rt;
          moved = true;
          break;
        }
        lam /= 2;
      }
      if (!moved || lam * step.norm() <= 1e-16 * (1e-300 + s.norm())) break;
    }
  }

  Vec ref_;
  std::vector<Chart> charts_;
  std::vector<Local> local_;
};

struct ResidualProfile {
  std::vector<double> t, residual;
  bool accepted = false;
};

/// dist(z + t u, C) for t = 10^-1 .. 10^-steps with u scaled to unit length;
/// accepts when the last residual is at most tangent * t.
inline ResidualProfile tangent_probe(const Parameterization& c, const VectorXd& u, const Thresholds& th = {}) {
  ResidualProfile p;
  VectorXd dir = u.norm() == 0 ? u : VectorXd(u / u.norm());
  for (int k = 1; k <= th.steps; ++k) {
    double t = std::pow(10.0, -k);
    p.t.push_back(t);
    p.residual.push_back(c.distance(t * dir));
  }
  p.accepted = p.residual.back() <= th.tangent * p.t.back();
  return p;
}

/// dist(z + t u + t^2/2 v, C) after the rescaling (u, v) -> (u/|u|, v/|u|^2),
/// which maps second order tangents to second order tangents; accepts when
/// the last residual is at most second_tangent * t^2.
inline ResidualProfile second_tangent_probe(const Parameterization& c, const VectorXd& u, const VectorXd& v,
                                            const Thresholds& th = {}) {
  ResidualProfile p;
  double s = u.norm() == 0 ? 1.0 : u.norm();
  for (int k = 1; k <= th.steps; ++k) {
    double t = std::pow(10.0, -k);
    p.t.push_back(t);
    p.residual.push_back(c.distance(t * (u / s) + 0.5 * t * t * (v / (s * s))));
  }
  p.accepted = p.residual.back() <= th.second_tangent * p.t.back() * p.t.back();
  return p;
}

/// |u| u' - |u'| u small relative to |u'||u|, and |u'| <= delta.
inline bool in_directional_neighborhood(const VectorXd& y, const VectorXd& u, double delta, double rho) {
  if (y.norm() > delta) return false;
  if (u.norm() == 0) return true;
  return (u.norm() * y - y.norm() * u).norm() <= rho * y.norm() * u.norm();
}

struct NormalProbe {
  bool found = false;
  double approach = std::numeric_limits<double>::infinity();
};

/// Looks for proximal normals at points z + t u' (u' near u) approaching z*.
inline NormalProbe dir_normal_probe(const Parameterization& c, const VectorXd& direction, const VectorXd& zstar,
                                    const Thresholds& th = {}) {
  NormalProbe out;
  VectorXd u = direction.norm() == 0 ? direction : VectorXd(direction / direction.norm());
  double scale = std::max(1.0, zstar.norm());
  if (zstar.norm() == 0) {
    out.found = true;
    out.approach = 0;
    return out;
  }
  std::mt19937_64 rng(th.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0, 1);
  auto dim = static_cast<Eigen::Index>(c.dim());
  for (int trial = 0; trial < th.normal_trials; ++trial) {
    double t = std::pow(10.0, -(4 + trial % 3));
    VectorXd r(dim);
    for (Eigen::Index i = 0; i < dim; ++i) r[i] = gauss(rng);
    r *= unit(rng) / r.norm();
    VectorXd target = u.norm() == 0 ? VectorXd(t * r) : VectorXd(t * (u + (trial == 0 ? 0.0 : th.aperture / 2) * u.norm() * r));
    VectorXd y = c.project(target).point;
    double delta = u.norm() == 0 ? 2 * t : th.radius;
    if (!in_directional_neighborhood(y, u, delta, th.aperture)) continue;
    double eps = 1e-3 * t / scale;
    VectorXd q = y + eps * zstar;
    VectorXd y2 = c.project(q).point;
    if (!in_directional_neighborhood(y2, u, delta, th.aperture)) continue;
    VectorXd v = (q - y2) / eps;
    out.approach = std::min(out.approach, (v - zstar).norm() / scale);
  }
  out.found = out.approach <= th.normal;
  return out;
}

struct CurvatureEstimate {
  double value = std::numeric_limits<double>::infinity();  // grid minimum
  double along_normal = std::numeric_limits<double>::infinity();
  double scale = 1;  // |u|^2 |z*|; errors are judged relative to it
};

/// Estimates liminf -2 <z*, u'>/t over z + t u' in C, u' -> u. Pushes z + t u
/// outward along z* by growing amounts (which lands on the maximizers of
/// <z*, .> over the second order tangent set) and adds seeded random probes.
inline CurvatureEstimate curvature_liminf(const Parameterization& c, const VectorXd& u, const VectorXd& zstar,
                                          const Thresholds& th = {}) {
  CurvatureEstimate out;
  // the second subderivative is positively homogeneous of degree 2 in u and
  // linear in z*; probe with unit vectors and scale back
  double su = u.norm() == 0 ? 1.0 : u.norm(), sz = zstar.norm() == 0 ? 1.0 : zstar.norm();
  VectorXd un = u / su, dir = zstar / sz;
  out.scale = su * su * sz;
  auto value = [&](double t, const VectorXd& w) {
    VectorXd y = c.project(t * un + 0.5 * t * t * w).point;
    return -2 * dir.dot(y) / (t * t) * out.scale;
  };
  for (double a : {1e2, 1e3, 1e4, 1e5}) {
    double v = value(1e-3 / a, a * dir);
    out.along_normal = v;
    out.value = std::min(out.value, v);
  }
  std::mt19937_64 rng(th.seed);
  std::normal_distribution<double> gauss;
  auto dim = static_cast<Eigen::Index>(c.dim());
  for (int s = 0; s < th.curvature_samples; ++s) {
    VectorXd w(dim);
    for (Eigen::Index i = 0; i < dim; ++i) w[i] = 10 * gauss(rng);
    out.value = std::min(out.value, value(1e-6, w));
  }
  return out;
}

struct GridEstimate {
  double beta = std::numeric_limits<double>::infinity();
  std::vector<double> witness;  // grid point attaining beta
  double objective_gap = 0;     // f(witness) - f(xbar)
  double distance = 0;          // dist(phi(witness), Omega)
};

/// min over grid points x != xbar of max{f(x) - f(xbar), dist(phi(x), Omega)} / |x - xbar|^2
/// with phi(x) = (x, -F(x)).
inline GridEstimate essential_min_grid(const GepProblem& p, const Vec& xbar, const Parameterization& omega,
                                       const std::vector<double>& lo, const std::vector<double>& hi, double step) {
  std::size_t n = p.n();
  require_dim(lo.size() == n && hi.size() == n && xbar.size() == n, "grid box has wrong length");
  if (!(step > 0)) throw Error("grid step must be positive");
  FloatMap f(p.f), F(p.F);
  VectorXd xb = to_eigen(xbar), ref = to_eigen(omega.reference());
  double fbar = f.eval(xb)[0];
  std::vector<long> counts(n);
  for (std::size_t i = 0; i < n; ++i) counts[i] = std::lround(std::floor((hi[i] - lo[i]) / step + 1e-9)) + 1;
  GridEstimate out;
  std::vector<long> idx(n, 0);
  VectorXd x(static_cast<Eigen::Index>(n)), phi(ref.size());
  while (true) {
    for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = lo[i] + static_cast<double>(idx[i]) * step;
    double r2 = (x - xb).squaredNorm();
    if (r2 > 1e-20) {
      phi << x, -F.eval(x);
      double gap = f.eval(x)[0] - fbar;
      double dist = omega.distance(phi - ref);
      double ratio = std::max(gap, dist) / r2;
      if (ratio < out.beta) out = {ratio, to_std(x), gap, dist};
    }
    std::size_t k = 0;
    while (k < n && ++idx[k] == counts[k]) idx[k++] = 0;
    if (k == n) break;
  }
  return out;
}

struct DerivativeReport {
  double jacobian_error = 0, hessian_error = 0;
  bool ok = false;
};

/// Central differences against the exact Jacobian and second directional
/// derivative along w, relative to max(1, |exact|).
inline DerivativeReport fd_derivative_check(const PolyMap& p, const Vec& z, const Vec& w, const Thresholds& th = {}) {
  FloatMap fm(p);
  VectorXd x = to_eigen(z), dir = to_eigen(w);
  MatrixXd jex = to_eigen(p.jacobian(z));
  VectorXd hex = to_eigen(p.hessian_form(z, w));
  const double h1 = 1e-5, h2 = 1e-4;
  MatrixXd jfd(jex.rows(), jex.cols());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    VectorXd e = VectorXd::Zero(x.size());
    e[k] = h1;
    jfd.col(k) = (fm.eval(x + e) - fm.eval(x - e)) / (2 * h1);
  }
  VectorXd hfd = (fm.eval(x + h2 * dir) - 2 * fm.eval(x) + fm.eval(x - h2 * dir)) / (h2 * h2);
  DerivativeReport r;
  double js = std::max(1.0, jex.cwiseAbs().maxCoeff()), hs = std::max(1.0, hex.size() ? hex.cwiseAbs().maxCoeff() : 0.0);
  r.jacobian_error = jex.size() ? (jfd - jex).cwiseAbs().maxCoeff() / js : 0.0;
  r.hessian_error = hex.size() ? (hfd - hex).cwiseAbs().maxCoeff() / hs : 0.0;
  r.ok = r.jacobian_error <= th.derivative && r.hessian_error <= th.derivative;
  return r;
}

}  // namespace gepsoc::oracle
