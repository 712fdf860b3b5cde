#pragma once

// Runs the floating-point oracles against the exact objects of Omega at a
// reference point and tallies agreement.

#include <gepsoc/oracles.hpp>

namespace gepsoc::oracle {

struct OracleCheck {
  std::string name;
  bool pass = true;
  std::size_t probes = 0;
  double worst = 0;  // worst observed margin statistic (check dependent)
  std::vector<std::string> failures;

  void fail(std::string msg) {
    pass = false;
    if (failures.size() < 8) failures.push_back(std::move(msg));
  }
};

struct SuiteReport {
  std::vector<OracleCheck> checks;
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.pass; });
  }
};

namespace detail {

inline Vec cone_representative(const ConvexCone& c) {
  Vec r = c.relint_point();
  for (const auto& v : c.lineality()) r = r + v;
  return r;
}

inline std::string vstr(const Vec& v) { return to_string(v); }

}  // namespace detail

/// Every sampled chart point lies in Omega (exact test).
inline OracleCheck check_chart_membership(const OmegaContext& ctx, const Parameterization& param,
                                          const Thresholds& th) {
  OracleCheck out{"chart_membership"};
  std::mt19937_64 rng(th.seed);
  std::uniform_int_distribution<int> num(-10, 10);
  for (std::size_t ci = 0; ci < param.charts().size(); ++ci) {
    const auto& c = param.charts()[ci];
    for (int s = 0; s < 20; ++s) {
      Vec p = c.base;
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] += ratio(num(rng), 20);
        if (c.lo[i] && p[i] < *c.lo[i]) p[i] = *c.lo[i];
        if (c.hi[i] && *c.hi[i] < p[i]) p[i] = *c.hi[i];
      }
      ++out.probes;
      Vec y = c.map.eval(p);
      if (!omega_member(ctx.g(), ctx.b(), ctx.engine().polyhedron(), y))
        out.fail("chart " + std::to_string(ci) + " leaves Omega at parameters " + detail::vstr(p));
    }
  }
  return out;
}

/// Certified tangents pass the probe; directions rejected by the exact
/// decomposition fail it.
inline OracleCheck check_tangents(const OmegaContext& ctx, const Parameterization& param, const Thresholds& th) {
  OracleCheck out{"tangent"};
  std::vector<Vec> dirs;
  auto t = ctx.tangent_omega();
  for (const auto& piece : t.pieces()) {
    dirs.push_back(detail::cone_representative(piece));
    for (const auto& r : piece.rays()) dirs.push_back(r);
    for (const auto& l : piece.lineality()) {
      dirs.push_back(l);
      dirs.push_back(-l);
    }
  }
  std::mt19937_64 rng(th.seed);
  std::uniform_int_distribution<int> num(-6, 6);
  for (int s = 0; s < 30; ++s) {
    Vec d(param.dim());
    for (auto& x : d) x = num(rng);
    dirs.push_back(d);
  }
  for (const auto& d : dirs) {
    if (is_zero(d)) continue;
    bool exact = ctx.recover_ue(d).has_value();
    VectorXd u = to_eigen(d);
    u /= u.norm();
    auto prof = tangent_probe(param, u, th);
    ++out.probes;
    double ratio = prof.residual.back() / prof.t.back();
    if (exact) out.worst = std::max(out.worst, ratio);
    if (exact != prof.accepted)
      out.fail(std::string(exact ? "certified tangent rejected: " : "non-tangent accepted: ") + detail::vstr(d) +
               " residual/t=" + std::to_string(ratio));
  }
  return out;
}

/// Members of T^2_Omega built from piece representatives pass the probe.
inline OracleCheck check_second_tangents(const OmegaContext& ctx, const Parameterization& param,
                                         const Thresholds& th) {
  OracleCheck out{"second_tangent"};
  auto t = ctx.tangent_omega();
  for (const auto& piece : t.pieces()) {
    Vec eta = detail::cone_representative(piece);
    if (is_zero(eta)) continue;
    auto w = ctx.recover_ue(eta);
    if (!w) {
      out.fail("representative not recovered: " + detail::vstr(eta));
      continue;
    }
    auto t2 = ctx.second_tangent_omega(*w);
    for (const auto& p : t2.pieces()) {
      std::vector<Vec> pts{p.relint_point()};
      for (const auto& v : p.vertices()) pts.push_back(v);
      for (const auto& xi : pts) {
        auto prof = second_tangent_probe(param, to_eigen(eta), to_eigen(xi), th);
        ++out.probes;
        double t2v = prof.t.back() * prof.t.back();
        out.worst = std::max(out.worst, prof.residual.back() / t2v);
        if (!prof.accepted)
          out.fail("second order tangent rejected: eta=" + detail::vstr(eta) + " xi=" + detail::vstr(xi));
      }
    }
  }
  return out;
}

/// Directional limiting normals are approached by proximal normals along the
/// direction; a vector outside the exact cone is not.
inline OracleCheck check_dir_normals(const OmegaContext& ctx, const Parameterization& param, const Thresholds& th) {
  OracleCheck out{"dir_normal"};
  auto t = ctx.tangent_omega();
  std::mt19937_64 rng(th.seed);
  std::uniform_int_distribution<int> num(-5, 5);
  for (const auto& piece : t.pieces()) {
    Vec eta = detail::cone_representative(piece);
    if (is_zero(eta)) continue;
    auto w = ctx.recover_ue(eta);
    if (!w) continue;
    auto normals = ctx.dir_normal_omega(*w, NormalRegime::Limiting);
    std::vector<Vec> members;
    for (const auto& c : normals.pieces()) {
      members.push_back(detail::cone_representative(c));
      for (const auto& r : c.rays()) members.push_back(r);
    }
    for (const auto& z : members) {
      auto pr = dir_normal_probe(param, to_eigen(eta), to_eigen(z), th);
      ++out.probes;
      out.worst = std::max(out.worst, pr.approach);
      if (!pr.found)
        out.fail("limiting normal not approached: eta=" + detail::vstr(eta) + " z*=" + detail::vstr(z) +
                 " approach=" + std::to_string(pr.approach));
    }
    for (int s = 0; s < 5; ++s) {
      Vec z(param.dim());
      for (auto& x : z) x = num(rng);
      if (normals.contains(z)) continue;
      auto pr = dir_normal_probe(param, to_eigen(eta), to_eigen(z), th);
      ++out.probes;
      if (pr.found) out.fail("non-normal approached: eta=" + detail::vstr(eta) + " z*=" + detail::vstr(z));
    }
  }
  return out;
}

/// Finite second subderivatives agree with the liminf estimate, and
/// sigma-hat <= sigma wherever both are finite.
inline OracleCheck check_curvature(const OmegaContext& ctx, const Parameterization& param, const Thresholds& th) {
  OracleCheck out{"curvature"};
  auto t = ctx.tangent_omega();
  for (const auto& piece : t.pieces()) {
    Vec eta = detail::cone_representative(piece);
    if (is_zero(eta)) continue;
    auto w = ctx.recover_ue(eta);
    if (!w) continue;
    auto reg = ctx.dir_normal_omega(*w, NormalRegime::RegularOfTangent);
    std::vector<Vec> covs;
    for (const auto& c : reg.pieces()) {
      covs.push_back(detail::cone_representative(c));
      for (const auto& r : c.rays()) covs.push_back(r);
      for (const auto& l : c.lineality()) {
        covs.push_back(l);
        covs.push_back(-l);
      }
    }
    for (const auto& z : covs) {
      if (is_zero(z)) continue;
      auto cv = ctx.curvature_omega(*w, z);
      if (cv.sigma.is_finite() && cv.sigma_hat.is_finite() && !(cv.sigma_hat <= cv.sigma))
        out.fail("sigma-hat exceeds sigma at z*=" + detail::vstr(z));
      if (!cv.d2delta.is_finite()) continue;
      auto est = curvature_liminf(param, to_eigen(eta), to_eigen(z), th);
      ++out.probes;
      double err = std::abs(est.value - to_double(cv.d2delta.value)) / est.scale;
      out.worst = std::max(out.worst, err);
      if (!(err <= th.curvature))
        out.fail("curvature mismatch at eta=" + detail::vstr(eta) + " z*=" + detail::vstr(z) + ": exact " +
                 cv.d2delta.str() + " estimate " + std::to_string(est.value));
    }
  }
  return out;
}

inline SuiteReport run_oracle_suite(const OmegaContext& ctx, const Parameterization& param, const Thresholds& th = {}) {
  if (param.reference() != ctx.omega_bar())
    throw Error("chart reference " + to_string(param.reference()) + " differs from omega_bar " +
                to_string(ctx.omega_bar()));
  SuiteReport r;
  r.checks.push_back(check_chart_membership(ctx, param, th));
  r.checks.push_back(check_tangents(ctx, param, th));
  r.checks.push_back(check_second_tangents(ctx, param, th));
  r.checks.push_back(check_dir_normals(ctx, param, th));
  r.checks.push_back(check_curvature(ctx, param, th));
  return r;
}

/// A qualified necessary-condition failure at a point the grid oracle sees
/// as a strict local minimizer contradicts the necessary condition.
inline void soundness_hook(const Verdict& v, const GridEstimate& g, double margin = 1e-3) {
  if (v.mode != Mode::Necessary || !(g.beta >= margin)) return;
  for (const auto& r : v.records)
    if (r.outcome == Outcome::Fail)
      throw ContractViolation("necessary condition fails at " + to_string(r.d) +
                              " although the grid oracle reports quadratic growth");
}

}  // namespace gepsoc::oracle
