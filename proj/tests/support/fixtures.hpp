#pragma once

// Constraint data with analytic charts of Omega for oracle tests.
//
// Graph-form family: P = R^l_-, g_i(x) = x_i - q_i(x_tail) with quadratic q_i
// in the last n - l variables, b(x) a quadratic l x m matrix. For an active
// set I containing supp(dbar*), the chart
//   (s, eta_I, tail) -> (x(s, tail), b(x)^T eta),  x_i = q_i(tail) + s_i,
// with s_i = 0 on I, s <= 0 off I and eta_I >= 0, sweeps Omega near omega_bar.

#include <gepsoc/oracles.hpp>

#include <random>

namespace gepsoc::testing {

struct OmegaFixture {
  std::string name;
  PolyMap g, b;
  ConvexPolyhedron P;
  Vec xbar, dstar;
  std::vector<oracle::Chart> charts;

  OmegaContext context(bool fast = false) const { return OmegaContext(g, b, P, xbar, dstar, fast); }
  oracle::Parameterization param() const { return oracle::Parameterization(context().omega_bar(), charts); }
};

inline Polynomial var(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }
inline Polynomial cst(std::size_t n, const Rat& c) { return Polynomial::constant(n, c); }

/// Builds the fixture from q (l polynomials in the n - l tail variables),
/// b (l*m polynomials in n variables), the tail of xbar, the slack values
/// g(xbar) <= 0 and dbar*.
inline OmegaFixture graph_form(std::string name, std::size_t n, std::size_t m, const std::vector<Polynomial>& q,
                               const PolyMap& b, const Vec& tail, const Vec& slack, const Vec& dstar) {
  std::size_t l = q.size(), r = n - l;
  OmegaFixture fx;
  fx.name = std::move(name);
  fx.P = nonpositive_orthant(l);
  fx.b = b;
  fx.dstar = dstar;
  // g_i(x) = x_i - q_i(x_tail)
  std::vector<Polynomial> tail_vars;
  for (std::size_t k = 0; k < r; ++k) tail_vars.push_back(var(n, l + k));
  // composing with an empty substitution cannot know the target arity
  auto lift = [&](const Polynomial& p, const std::vector<Polynomial>& subs, std::size_t vars) {
    return subs.empty() ? cst(vars, p.eval({})) : p.compose(subs);
  };
  std::vector<Polynomial> gs;
  for (std::size_t i = 0; i < l; ++i) gs.push_back(var(n, i) - lift(q[i], tail_vars, n));
  fx.g = PolyMap(n, gs);
  fx.xbar = Vec(n);
  for (std::size_t i = 0; i < l; ++i) fx.xbar[i] = q[i].eval(tail) + slack[i];
  for (std::size_t k = 0; k < r; ++k) fx.xbar[l + k] = tail[k];

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < l; ++i)
    if (sgn(slack[i]) == 0) active.push_back(i);
  for (unsigned mask = 0; mask < (1u << active.size()); ++mask) {
    std::vector<bool> in(l, false);
    for (std::size_t a = 0; a < active.size(); ++a)
      if (mask & (1u << a)) in[active[a]] = true;
    bool ok = true;
    for (std::size_t i = 0; i < l; ++i)
      if (sgn(dstar[i]) != 0 && !in[i]) ok = false;
    if (!ok) continue;
    // parameters: one per constraint (slack or multiplier), then the tail
    std::size_t k = l + r;
    std::vector<Polynomial> ptail;
    for (std::size_t j = 0; j < r; ++j) ptail.push_back(var(k, l + j));
    std::vector<Polynomial> x(n);
    for (std::size_t i = 0; i < l; ++i) x[i] = lift(q[i], ptail, k) + (in[i] ? Polynomial(k) : var(k, i));
    for (std::size_t j = 0; j < r; ++j) x[l + j] = ptail[j];
    PolyMap bx = b.compose(PolyMap(k, x));
    std::vector<Polynomial> comps = x;
    for (std::size_t j = 0; j < m; ++j) {
      Polynomial y(k);
      for (std::size_t i = 0; i < l; ++i)
        if (in[i]) y = y + bx[i * m + j] * var(k, i);
      comps.push_back(y);
    }
    oracle::Chart c{PolyMap(k, comps), std::vector<std::optional<Rat>>(k), std::vector<std::optional<Rat>>(k), Vec(k)};
    for (std::size_t i = 0; i < l; ++i) {
      if (in[i]) {
        c.lo[i] = Rat(0);
        c.base[i] = dstar[i];
      } else {
        c.hi[i] = Rat(0);
        c.base[i] = slack[i];
      }
    }
    for (std::size_t j = 0; j < r; ++j) c.base[l + j] = tail[j];
    fx.charts.push_back(std::move(c));
  }
  return fx;
}

/// n = 2, g = x_1, b = [1], P = R_-, xbar = 0.
inline OmegaFixture instance_a() {
  return graph_form("instance-a", 2, 1, {Polynomial(1)}, PolyMap::constant(2, Vec{1}), Vec{0}, Vec{0}, Vec{0});
}

/// Random graph-form instance with n <= 3, l = m <= 2; b(xbar) is kept
/// invertible so the injectivity assumptions hold.
inline OmegaFixture random_quadratic(std::mt19937_64& rng, const std::string& name) {
  std::uniform_int_distribution<int> small(-2, 2), dim_l(1, 2);
  std::size_t l = static_cast<std::size_t>(dim_l(rng));
  std::size_t n = l + std::uniform_int_distribution<std::size_t>(l == 2 ? 0 : 1, 3 - l)(rng);
  std::size_t r = n - l, m = l;
  auto rq = [&](std::size_t vars) {
    Polynomial p(vars);
    for (std::size_t a = 0; a < vars; ++a) {
      p = p + var(vars, a).scaled(ratio(small(rng), 2));
      for (std::size_t c = a; c < vars; ++c) p = p + (var(vars, a) * var(vars, c)).scaled(ratio(small(rng), 2));
    }
    return p;
  };
  std::vector<Polynomial> q;
  for (std::size_t i = 0; i < l; ++i) q.push_back(r == 0 ? Polynomial(0) : rq(r));
  Vec tail(r), slack(l), dstar(l);
  for (auto& t : tail) t = ratio(small(rng), 2);
  for (std::size_t i = 0; i < l; ++i) {
    int kind = std::uniform_int_distribution<int>(0, 3)(rng);
    slack[i] = kind == 0 ? Rat(-1) : Rat(0);
    dstar[i] = kind >= 2 ? Rat(1 + (kind == 3)) : Rat(0);
  }
  while (true) {
    std::vector<Polynomial> bc;
    for (std::size_t e = 0; e < l * m; ++e) bc.push_back(rq(n).scaled(ratio(1, 2)) + cst(n, Rat(small(rng))));
    PolyMap b(n, bc);
    auto fx = graph_form(name, n, m, q, b, tail, slack, dstar);
    if (rank(eval_matrix(b, fx.xbar, l, m)) == l) return fx;
  }
}

}  // namespace gepsoc::testing
