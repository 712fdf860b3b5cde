#pragma once

// Subcommands of the gepsoc tool. Each returns the report; main() maps
// exceptions to exit codes.

#include <gepsoc/gepsoc.hpp>

namespace gepsoc::cli {

using io::json;

enum ExitCode { kCompleted = 0, kInputError = 2, kContractViolation = 3 };

struct GeometryArgs {
  std::string problem;
  std::optional<std::string> point, direction, covector;
  std::string query = "tangent";
  std::string regime = "limiting";
  bool fast = false;
  std::uint64_t seed = 1;
};

struct CheckArgs {
  std::string problem;
  std::optional<std::string> point;
  std::vector<std::string> directions;
  std::string mode = "sufficient";
  std::size_t samples = 0;
  std::uint64_t seed = 1;
  bool with_oracle = false;
  bool fast = false;
};

struct ValidateArgs {
  std::string problem;
  std::uint64_t seed = 1;
};

inline json report_header(const std::string& command, std::uint64_t seed) {
  return {{"schema", io::kReportSchema}, {"tool", "gepsoc"}, {"version", GEPSOC_VERSION}, {"seed", seed},
          {"command", command}};
}

inline Vec candidate_point(const io::ProblemFile& f, const std::optional<std::string>& flag) {
  if (flag) return io::parse_point(*flag);
  if (f.point) return *f.point;
  throw Error("no candidate point: pass --point or add \"point\" to the problem file");
}

namespace detail {

inline json witness_json(const std::optional<TangentWitness>& w) {
  if (!w) return {{"member", false}};
  return {{"member", true}, {"u", io::to_json(w->u)}, {"estar", io::to_json(w->estar)}, {"piece", w->piece}};
}

inline json decomposition_json(const NormalResult& r) {
  const char* s = r.status == NormalResult::Status::Member      ? "member"
                  : r.status == NormalResult::Status::NotNormal ? "not_normal"
                                                                : "no_decomposition";
  json j{{"status", s}};
  if (r.status == NormalResult::Status::Member)
    j.update({{"r", io::to_json(r.r)}, {"fstar", io::to_json(r.fstar)}, {"piece", r.piece}});
  return j;
}

/// Builds the Omega context at xbar with dbar* = eta*, or fills the report
/// with the reason it cannot be built.
inline std::optional<OmegaContext> omega_at(const GepProblem& p, const Vec& xbar, bool fast, json& report) {
  require_dim(xbar.size() == p.n(), "point has wrong length");
  auto eta = compute_eta_star(p.F, p.b, p.g, p.P, xbar);
  if (eta.status == EtaStar::Status::NoSolution) throw Error("point is infeasible: no eta in N_P(g(x)) solves the equation");
  auto a = check_basic_assumptions(p.g, p.b, p.P, xbar);
  report["assumptions"] = io::to_json(a);
  if (!a.g_ok || !a.b_ok) {
    report["status"] = "assumptions_failed";
    return std::nullopt;
  }
  if (eta.status == EtaStar::Status::MultipleSolutions)
    throw ContractViolation("eta* is not unique although the injectivity assumptions hold");
  report["eta_star"] = io::to_json(eta.eta);
  OmegaContext ctx(p.g, p.b, p.P, xbar, eta.eta, fast && is_nonpositive_orthant(p.P));
  report["omega_bar"] = io::to_json(ctx.omega_bar());
  return ctx;
}

}  // namespace detail

inline json cmd_geometry(const GeometryArgs& a) {
  auto file = io::load_problem(a.problem);
  auto prob = file.problem();
  Vec xbar = candidate_point(file, a.point);
  json rep = report_header("geometry", a.seed);
  rep["input"] = {{"problem", a.problem}, {"name", file.name},   {"kind", file.kind},
                  {"point", io::to_json(xbar)}, {"query", a.query}, {"regime", a.regime}};
  std::optional<Vec> dir, cov;
  if (a.direction) rep["input"]["direction"] = io::to_json(*(dir = io::parse_point(*a.direction)));
  if (a.covector) rep["input"]["covector"] = io::to_json(*(cov = io::parse_point(*a.covector)));
  auto ctx = detail::omega_at(prob, xbar, a.fast || file.is_mpvi(), rep);
  if (!ctx) return rep;
  std::size_t dim = ctx->n() + ctx->m();
  if (dir) require_dim(dir->size() == dim, "direction must have n + m entries");
  if (cov) require_dim(cov->size() == dim, "covector must have n + m entries");
  NormalRegime regime;
  if (a.regime == "limiting")
    regime = NormalRegime::Limiting;
  else if (a.regime == "regular")
    regime = NormalRegime::RegularOfTangent;
  else
    throw Error("unknown regime '" + a.regime + "' (limiting or regular)");
  auto need_witness = [&]() {
    if (!dir) throw Error("query '" + a.query + "' needs --direction");
    auto w = ctx->recover_ue(*dir);
    if (!w) throw Error("direction is not tangent to Omega at the point");
    return *w;
  };
  json res;
  if (a.query == "tangent") {
    res["tangent_omega"] = io::to_json(ctx->tangent_omega());
    res["tangent_gph"] = io::to_json(ctx->tangent_gph_pieces());
    if (dir) res["witness"] = detail::witness_json(ctx->recover_ue(*dir));
  } else if (a.query == "normal_dir") {
    auto w = need_witness();
    res["witness"] = detail::witness_json(w);
    res["normal_omega"] = io::to_json(ctx->dir_normal_omega(w, regime));
    res["normal_gph"] = io::to_json(ctx->normal_pieces(w, regime));
    if (cov) res["decomposition"] = detail::decomposition_json(ctx->recover_rf(w, *cov, regime));
  } else if (a.query == "second_tangent") {
    auto w = need_witness();
    res["witness"] = detail::witness_json(w);
    res["second_tangent_omega"] = io::to_json(ctx->second_tangent_omega(w));
  } else if (a.query == "curvature") {
    auto w = need_witness();
    if (!cov) throw Error("query 'curvature' needs --covector");
    auto c = ctx->curvature_omega(w, *cov);
    res["witness"] = detail::witness_json(w);
    res["sigma"] = io::to_json(c.sigma);
    res["sigma_hat"] = io::to_json(c.sigma_hat);
    res["d2delta"] = io::to_json(c.d2delta);
  } else {
    throw Error("unknown query '" + a.query + "' (tangent, normal_dir, second_tangent, curvature)");
  }
  rep["status"] = "completed";
  rep["result"] = res;
  return rep;
}

inline json cmd_check(const CheckArgs& a) {
  auto file = io::load_problem(a.problem);
  Vec xbar = candidate_point(file, a.point);
  json rep = report_header("check", a.seed);
  Mode mode;
  if (a.mode == "necessary")
    mode = Mode::Necessary;
  else if (a.mode == "sufficient")
    mode = Mode::Sufficient;
  else
    throw Error("unknown mode '" + a.mode + "' (necessary or sufficient)");
  std::optional<std::vector<Vec>> dirs;
  for (const auto& d : a.directions) {
    if (!dirs) dirs.emplace();
    dirs->push_back(io::parse_point(d));
  }
  if (!dirs && !file.directions.empty()) dirs = file.directions;
  rep["input"] = {{"problem", a.problem}, {"name", file.name},     {"kind", file.kind},
                  {"point", io::to_json(xbar)}, {"mode", a.mode}, {"samples", a.samples}};
  if (dirs) rep["input"]["directions"] = io::to_json(*dirs);
  CheckOptions opt{a.fast, a.samples, a.seed};
  auto prob = file.problem();
  require_dim(xbar.size() == prob.n(), "point has wrong length");
  if (file.is_mpvi() && !mpvi_nondegenerate(*file.mpvi, xbar)) {
    rep["status"] = "assumptions_failed";
    rep["assumptions"] = {{"mpvi_nondegenerate", false}};
    return rep;
  }
  auto eta = compute_eta_star(prob.F, prob.b, prob.g, prob.P, xbar);
  if (eta.status == EtaStar::Status::NoSolution) throw Error("point is infeasible: no eta in N_P(g(x)) solves the equation");
  auto asm_report = check_basic_assumptions(prob.g, prob.b, prob.P, xbar);
  if (!asm_report.g_ok || !asm_report.b_ok) {
    rep["status"] = "assumptions_failed";
    rep["assumptions"] = io::to_json(asm_report);
    return rep;
  }
  Verdict v = file.is_mpvi() ? mpvi_check(*file.mpvi, xbar, mode, opt, dirs)
                             : GepChecker(prob, xbar, opt.fast_path && is_nonpositive_orthant(prob.P))
                                   .check(mode, dirs, opt);
  rep["status"] = "completed";
  rep["verdict"] = io::to_json(v);
  if (a.with_oracle) {
    if (!file.fixtures.omega || !file.fixtures.grid)
      throw Error("--with-oracle needs omega_charts and grid fixtures in the problem file");
    const auto& g = *file.fixtures.grid;
    auto est = oracle::essential_min_grid(prob, xbar, *file.fixtures.omega, g.lo, g.hi, g.step);
    rep["oracle"] = {{"essential_min_grid", io::to_json(est)},
                     {"box_lo", g.lo},
                     {"box_hi", g.hi},
                     {"step", g.step}};
    oracle::soundness_hook(v, est);
  }
  return rep;
}

inline json cmd_validate(const ValidateArgs& a) {
  auto file = io::load_problem(a.problem);
  if (!file.fixtures.omega) throw Error("problem file has no omega_charts fixture");
  Vec xbar = candidate_point(file, std::nullopt);
  json rep = report_header("validate", a.seed);
  rep["input"] = {{"problem", a.problem}, {"name", file.name}, {"kind", file.kind}, {"point", io::to_json(xbar)}};
  auto prob = file.problem();
  auto ctx = detail::omega_at(prob, xbar, file.is_mpvi(), rep);
  if (!ctx) return rep;
  oracle::Thresholds th;
  th.seed = a.seed;
  auto suite = oracle::run_oracle_suite(*ctx, *file.fixtures.omega, th);
  json checks = json::array();
  for (const auto& c : suite.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"probes", c.probes}, {"worst", c.worst},
                      {"failures", c.failures}});
  rep["status"] = "completed";
  rep["thresholds"] = {{"tangent", th.tangent},   {"second_tangent", th.second_tangent}, {"normal", th.normal},
                       {"curvature", th.curvature}, {"steps", th.steps}};
  rep["checks"] = checks;
  rep["pass"] = suite.pass();
  return rep;
}

}  // namespace gepsoc::cli
