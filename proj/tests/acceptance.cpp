// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <gepsoc/gepsoc.hpp>

#include "support/fixtures.hpp"
#include "support/gph_corpus.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

using namespace gepsoc;
using namespace gepsoc::testing;

namespace {

struct Result {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

ConvexCone plane(std::vector<Vec> ineq, std::vector<Vec> eq) { return ConvexCone::from_hrep(2, ineq, eq); }

// Named pieces of R^2 written as (first coordinate, second coordinate).
const ConvexCone kZeroReal = plane({}, {{1, 0}});          // (0, R)
const ConvexCone kRealZero = plane({}, {{0, 1}});          // (R, 0)
const ConvexCone kPlusMinus = plane({{-1, 0}, {0, 1}}, {});  // (R_+, R_-)
const ConvexCone kMinusZero = plane({{1, 0}}, {{0, 1}});     // (R_-, 0)
const ConvexCone kZeroPlus = plane({{0, -1}}, {{1, 0}});     // (0, R_+)

ConeUnion u(std::vector<ConvexCone> pieces) { return ConeUnion(2, std::move(pieces)); }

Result table_fidelity() {
  auto t0 = Clock::now();
  auto P = nonpositive_orthant(1);
  int rows = 0, mismatches = 0, evaluations = 0;
  std::vector<std::string> bad;
  auto point = [](int a, int b) { return GphPoint{{Rat(a)}, {Rat(b)}}; };
  auto dir = [](int c, int d) { return GphDirection{{Rat(c)}, {Rat(d)}}; };
  auto check = [&](const std::string& row, const ConeUnion& got, const ConeUnion& want) {
    ++evaluations;
    if (!union_equal(got, want)) {
      ++mismatches;
      bad.push_back(row);
    }
  };
  // tangent cone, three strata; each stratum sampled at several points
  struct TRow {
    std::string name;
    std::vector<std::pair<int, int>> pts;
    ConeUnion want;
  };
  std::vector<TRow> trows{{"T a<0,b=0", {{-1, 0}, {-3, 0}}, u({kRealZero})},
                          {"T a=0,b=0", {{0, 0}}, u({kMinusZero, kZeroPlus})},
                          {"T a=0,b>0", {{0, 2}, {0, 1}}, u({kZeroReal})}};
  for (const auto& r : trows) {
    ++rows;
    for (auto [a, b] : r.pts) check(r.name, tangent_gph(P, point(a, b)), r.want);
  }
  // directional limiting normals and regular normals of the tangent cone
  struct NRow {
    std::string name;
    std::vector<std::array<int, 4>> pts;
    ConeUnion limiting;
    ConvexCone regular;
  };
  std::vector<NRow> nrows{
      {"a<0,b=0,c in R,d=0", {{-1, 0, 3, 0}, {-1, 0, -2, 0}, {-2, 0, 0, 0}}, u({kZeroReal}), kZeroReal},
      {"a=0,b=0,c<0,d=0", {{0, 0, -1, 0}, {0, 0, -5, 0}}, u({kZeroReal}), kZeroReal},
      {"a=0,b=0,c=0,d=0", {{0, 0, 0, 0}}, u({kZeroReal, kRealZero, kPlusMinus}), kPlusMinus},
      {"a=0,b=0,c=0,d>0", {{0, 0, 0, 1}, {0, 0, 0, 4}}, u({kRealZero}), kRealZero},
      {"a=0,b>0,c=0,d in R", {{0, 2, 0, -1}, {0, 1, 0, 0}, {0, 3, 0, 5}}, u({kRealZero}), kRealZero}};
  for (const auto& r : nrows) {
    rows += 2;
    for (auto [a, b, c, d] : r.pts) {
      check("N " + r.name, dir_limiting_normal_gph(P, point(a, b), dir(c, d)), r.limiting);
      check("Nhat " + r.name, u({regular_normal_of_tangent(P, point(a, b), dir(c, d))}), u({r.regular}));
    }
  }
  double secs = seconds_since(t0);
  bool pass = rows == 13 && mismatches == 0 && secs < 1.0;
  std::string detail = std::to_string(rows) + " table rows, " + std::to_string(evaluations) + " evaluations, " +
                       std::to_string(mismatches) + " mismatches, " + fmt(secs) + " s (limit 1 s)";
  for (const auto& b : bad) detail += "; mismatch in " + b;
  return {pass, detail};
}

std::vector<GphCase> gph_corpus() {
  std::mt19937_64 rng(20240611);
  std::vector<GphCase> out;
  for (int i = 0; i < 100; ++i) out.push_back(random_gph_case(rng));
  return out;
}

Result critical_cone_reduction(const std::vector<GphCase>& corpus) {
  auto t0 = Clock::now();
  const Rat t = ratio(1, 1000000000);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> small(-3, 3);
  long probes = 0, mismatches = 0, members = 0;
  for (const auto& c : corpus) {
    std::size_t l = c.P.dim();
    auto tan = tangent_gph(c.P, c.pt);
    auto faces = gph_by_faces(c.P);
    auto local = union_tangent(faces, concat(c.pt.d, c.pt.dstar));
    std::vector<Vec> pr;
    // points of the face-wise tangent pieces, the computed pieces, and perturbations
    for (int k = 0; k < 70; ++k) {
      const auto& piece = local.pieces()[std::uniform_int_distribution<std::size_t>(0, local.size() - 1)(rng)];
      pr.push_back(random_member(rng, piece));
    }
    for (int k = 0; k < 40; ++k) {
      const auto& piece = tan.pieces()[std::uniform_int_distribution<std::size_t>(0, tan.size() - 1)(rng)];
      pr.push_back(random_member(rng, piece));
    }
    for (int k = 0; k < 50; ++k) {
      Vec v = pr[static_cast<std::size_t>(k)];
      v[std::uniform_int_distribution<std::size_t>(0, 2 * l - 1)(rng)] += small(rng);
      pr.push_back(v);
    }
    while (pr.size() < 200) {
      Vec v(2 * l);
      for (auto& x : v) x = small(rng);
      pr.push_back(v);
    }
    for (const auto& v : pr) {
      ++probes;
      bool a = tan.contains(v);
      bool b = gph_member(c.P, c.pt.d + t * slice(v, 0, l), c.pt.dstar + t * slice(v, l, l));
      members += a;
      mismatches += a != b;
    }
  }
  double secs = seconds_since(t0);
  return {mismatches == 0, std::to_string(corpus.size()) + " cases, " + std::to_string(probes) + " probes (" +
                               std::to_string(members) + " tangent), " + std::to_string(mismatches) +
                               " mismatches, " + fmt(secs) + " s"};
}

Result face_pair_formula(const std::vector<GphCase>& corpus) {
  auto t0 = Clock::now();
  std::mt19937_64 rng(11);
  long queries = 0, mismatches = 0;
  for (const auto& c : corpus) {
    std::size_t l = c.P.dim();
    auto faces = gph_by_faces(c.P);
    Vec z = concat(c.pt.d, c.pt.dstar);
    auto local = union_tangent(faces, z);
    std::vector<Vec> dirs{zeros(2 * l)};
    const auto& piece = local.pieces()[std::uniform_int_distribution<std::size_t>(0, local.size() - 1)(rng)];
    dirs.push_back(random_member(rng, piece));
    for (const auto& w : dirs) {
      ++queries;
      auto exact = dir_limiting_normal_gph(c.P, c.pt, {slice(w, 0, l), slice(w, l, l)});
      auto oracle = union_dir_limiting_normal(faces, z, w);
      mismatches += !union_equal(exact, oracle);
    }
  }
  double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 60, std::to_string(queries) + " (P, point, direction) queries, " +
                                            std::to_string(mismatches) + " mismatches, " + fmt(secs) +
                                            " s (limit 60 s)"};
}

struct SuiteTally {
  long probes = 0, failures = 0;
  double worst = 0;
  std::vector<std::string> notes;
};

struct OracleRun {
  std::map<std::string, SuiteTally> by_check;
  long instances = 0;
  double secs = 0;
};

OracleRun run_oracles() {
  auto t0 = Clock::now();
  std::vector<OmegaFixture> fixtures{instance_a()};
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) fixtures.push_back(random_quadratic(rng, "quadratic-" + std::to_string(i)));
  OracleRun run;
  for (const auto& fx : fixtures) {
    ++run.instances;
    auto rep = oracle::run_oracle_suite(fx.context(), fx.param());
    for (const auto& c : rep.checks) {
      auto& s = run.by_check[c.name];
      s.probes += static_cast<long>(c.probes);
      s.failures += c.pass ? 0 : static_cast<long>(std::max<std::size_t>(1, c.failures.size()));
      s.worst = std::max(s.worst, c.worst);
      for (const auto& f : c.failures)
        if (s.notes.size() < 3) s.notes.push_back(fx.name + ": " + f);
    }
  }
  run.secs = seconds_since(t0);
  return run;
}

std::string tally(const std::string& name, const SuiteTally& s) {
  std::string out = name + " " + std::to_string(s.probes) + " probes, " + std::to_string(s.failures) + " failures";
  for (const auto& n : s.notes) out += "; " + n;
  return out;
}

Result tangent_agreement(const OracleRun& r) {
  const auto& m = r.by_check.at("chart_membership");
  const auto& t = r.by_check.at("tangent");
  const auto& s = r.by_check.at("second_tangent");
  bool pass = m.failures == 0 && t.failures == 0 && s.failures == 0 && t.probes > 0 && s.probes > 0;
  return {pass, std::to_string(r.instances) + " instances; " + tally("charts", m) + "; " + tally("tangent", t) +
                    " (worst residual/t " + fmt(t.worst) + ", tol 1e-3 at t=1e-4); " + tally("second order", s) +
                    " (worst residual/t^2 " + fmt(s.worst) + ", tol 1e-3)"};
}

Result curvature_agreement(const OracleRun& r) {
  const auto& c = r.by_check.at("curvature");
  const auto& n = r.by_check.at("dir_normal");
  bool pass = c.failures == 0 && n.failures == 0 && c.probes > 0;
  return {pass, tally("curvature", c) + " (worst relative error " + fmt(c.worst) + ", tol 1e-4); " +
                    tally("directional normals", n) + "; oracle suite " + fmt(r.secs) + " s"};
}

GepProblem instance_a_problem(const Polynomial& f) {
  auto fx = instance_a();
  return GepProblem{PolyMap(2, {f}), PolyMap(2, {var(2, 1)}), fx.g, fx.b, fx.P};
}

Result end_to_end() {
  auto t0 = Clock::now();
  auto fx = instance_a();
  Vec origin{0, 0};
  std::vector<std::string> notes;
  bool ok = true;

  GepChecker quad(instance_a_problem(var(2, 0) * var(2, 0) + var(2, 1) * var(2, 1)), origin);
  auto pieces = quad.enumerate_critical_pieces();
  std::vector<Vec> dirs{{-1, 0}, {-3, 0}, {0, -1}, {0, -2}};
  auto v = quad.check_sufficient(dirs);
  ok = ok && v.certified() && pieces.size() == 2;
  for (const auto& rec : v.records) {
    Rat want = 2 * dot(rec.d, rec.d);
    if (!rec.best_value || *rec.best_value != want) {
      ok = false;
      notes.push_back("value at " + to_string(rec.d) + " differs from 2|d|^2");
    }
  }
  auto g1 = oracle::essential_min_grid(quad.problem(), origin, fx.param(), {-0.5, -0.5}, {0.5, 0.5}, 0.01);
  ok = ok && g1.beta >= 0.05;
  double secs = seconds_since(t0);
  ok = ok && secs < 10;

  GepChecker lin(instance_a_problem(var(2, 1)), origin);
  auto w = lin.check_sufficient(std::nullopt);
  bool failing_dir = false;
  for (const auto& rec : w.records)
    if (rec.outcome == gepsoc::Outcome::Fail && rec.d == Vec{0, -1}) failing_dir = true;
  auto g2 = oracle::essential_min_grid(lin.problem(), origin, fx.param(), {-0.5, -0.5}, {0.5, 0.5}, 0.01);
  // violating feasible point: feasible (distance 0), strictly lower objective, on the ray x1 = 0, x2 < 0
  bool ray = g2.distance <= 1e-12 && g2.objective_gap < 0 && std::abs(g2.witness[0]) < 1e-12 && g2.witness[1] < 0;
  ok = ok && !w.certified() && failing_dir && ray;
  std::string detail = "x1^2+x2^2: " + v.conclusion + ", " + std::to_string(pieces.size()) +
                       " critical pieces, beta " + fmt(g1.beta) + " (need >= 0.05), " + fmt(secs) +
                       " s (limit 10 s); x2: " + w.conclusion + (failing_dir ? " at (0,-1)" : "") +
                       ", grid witness (" + fmt(g2.witness[0]) + ", " + fmt(g2.witness[1]) + ") gap " +
                       fmt(g2.objective_gap) + " distance " + fmt(g2.distance);
  for (const auto& n : notes) detail += "; " + n;
  return {ok, detail};
}

MpviProblem random_mpvi(std::mt19937_64& rng, Vec& z) {
  std::uniform_int_distribution<int> c(-2, 2), pick(0, 2);
  std::size_t l = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
  z = Vec{Rat(c(rng)), ratio(c(rng), 2)};
  auto quad = [&]() {
    Polynomial p(2);
    for (unsigned a = 0; a <= 2; ++a)
      for (unsigned b = 0; a + b <= 2; ++b)
        if (a + b > 0) p = p + (Polynomial::monomial(2, Rat(c(rng)), {a, b}));
    return p;
  };
  std::vector<Polynomial> psi;
  for (std::size_t i = 0; i < l; ++i) {
    Polynomial p = quad();
    // active with probability 2/3, slack -1 otherwise
    Rat target = pick(rng) == 0 ? Rat(-1) : Rat(0);
    psi.push_back(p + cst(2, target - p.eval(z)));
  }
  MpviProblem mp{1, 1, PolyMap(2, {quad()}), PolyMap(2, {quad()}), PolyMap(2, psi), true};
  return mp;
}

Result mpvi_consistency() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(99);
  int instances = 0, disagreements = 0, cone_mismatches = 0, compared = 0, nondegenerate = 0;
  std::vector<std::string> notes;
  while (instances < 50) {
    Vec z;
    auto mp = random_mpvi(rng, z);
    ++instances;
    bool nd = mpvi_nondegenerate(mp, z);
    auto gep = mpvi_reduce(mp);
    auto a = check_basic_assumptions(gep.g, gep.b, gep.P, z);
    // b = grad_y psi, so injectivity of b(z)^T on span N_P(psi(z)) is exactly nondegeneracy;
    // grad psi contains grad_y psi as a column block, so g_ok must follow.
    if (nd != a.b_ok || (nd && !a.g_ok)) {
      ++disagreements;
      if (notes.size() < 3) notes.push_back("assumption disagreement at " + to_string(z));
    }
    // fast vs general path on every cone of gph N_P used at this point
    Vec gz = gep.g.eval(z);
    std::vector<Vec> stars;
    auto eta = compute_eta_star(gep.F, gep.b, gep.g, gep.P, z);
    if (eta.status == EtaStar::Status::Unique) stars.push_back(eta.eta);
    auto ncone = gep.P.normal_at(gz);
    stars.push_back(ncone.relint_point());
    stars.push_back(zeros(gz.size()));
    for (const auto& s : stars) {
      GphPoint pt{gz, s};
      auto tan = tangent_gph(gep.P, pt);
      ++compared;
      cone_mismatches += !union_equal(tan, box_fast_path(gep.P, pt, {}, GphQuery::Tangent));
      for (const auto& piece : tan.pieces()) {
        for (const Vec& w : {piece.relint_point(), random_member(rng, piece)}) {
          GphDirection dir{slice(w, 0, gz.size()), slice(w, gz.size(), gz.size())};
          compared += 2;
          cone_mismatches +=
              !union_equal(dir_limiting_normal_gph(gep.P, pt, dir), box_fast_path(gep.P, pt, dir, GphQuery::DirNormal));
          cone_mismatches += !union_equal(ConeUnion(2 * gz.size(), {regular_normal_of_tangent(gep.P, pt, dir)}),
                                          box_fast_path(gep.P, pt, dir, GphQuery::RegularNormalOfTangent));
        }
      }
    }
    if (nd && eta.status == EtaStar::Status::Unique) {
      ++nondegenerate;
      OmegaContext slow(gep.g, gep.b, gep.P, z, eta.eta, false), fast(gep.g, gep.b, gep.P, z, eta.eta, true);
      auto ts = slow.tangent_omega();
      ++compared;
      cone_mismatches += !union_equal(ts, fast.tangent_omega());
      for (const auto& piece : ts.pieces()) {
        Vec w = random_member(rng, piece);
        auto ws = slow.recover_ue(w);
        auto wf = fast.recover_ue(w);
        if (!ws || !wf) {
          ++cone_mismatches;
          continue;
        }
        for (auto regime : {NormalRegime::Limiting, NormalRegime::RegularOfTangent}) {
          ++compared;
          cone_mismatches += !union_equal(slow.dir_normal_omega(*ws, regime), fast.dir_normal_omega(*wf, regime));
        }
      }
    }
  }
  double secs = seconds_since(t0);
  std::string detail = std::to_string(instances) + " MPVIs (" + std::to_string(nondegenerate) +
                       " nondegenerate), " + std::to_string(disagreements) + " assumption disagreements, " +
                       std::to_string(compared) + " cone comparisons, " + std::to_string(cone_mismatches) +
                       " fast/general mismatches, " + fmt(secs) + " s";
  for (const auto& n : notes) detail += "; " + n;
  return {disagreements == 0 && cone_mismatches == 0, detail};
}

Result derivative_exactness() {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> c(-3, 3), deg(0, 3), dim(1, 4);
  double worst_j = 0, worst_h = 0;
  int bad = 0;
  for (int k = 0; k < 50; ++k) {
    std::size_t n = static_cast<std::size_t>(dim(rng)), out = static_cast<std::size_t>(dim(rng));
    std::vector<Polynomial> comps;
    for (std::size_t i = 0; i < out; ++i) {
      Polynomial p(n);
      for (int t = 0; t < 6; ++t) {
        Exponents e(n);
        for (auto& x : e) x = static_cast<unsigned>(deg(rng));
        p = p + Polynomial::monomial(n, ratio(c(rng), 1 + std::abs(c(rng))), e);
      }
      comps.push_back(p);
    }
    PolyMap map(n, comps);
    Vec z(n), w(n);
    for (auto& x : z) x = ratio(c(rng), 3);
    for (auto& x : w) x = ratio(c(rng), 2);
    auto r = oracle::fd_derivative_check(map, z, w);
    worst_j = std::max(worst_j, r.jacobian_error);
    worst_h = std::max(worst_h, r.hessian_error);
    bad += !r.ok;
  }
  return {bad == 0, "50 maps, worst relative error jacobian " + fmt(worst_j) + ", second derivative " + fmt(worst_h) +
                        " (tol 1e-6), " + std::to_string(bad) + " failures"};
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(GEPSOC_CLI) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Result contract_sentinels() {
  int runs = 0, threes = 0, other = 0;
  std::vector<std::string> notes;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(GEPSOC_PROBLEMS))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto file = io::load_problem(f.string());
    std::string p = "--problem " + f.string();
    std::vector<std::string> cmds{"geometry " + p, "check " + p + " --mode necessary --samples 3",
                                  "check " + p + " --mode sufficient --samples 3"};
    if (file.fixtures.omega) {
      cmds.push_back("validate " + p);
      cmds.push_back("check " + p + " --mode necessary --with-oracle");
    }
    for (const auto& c : cmds) {
      ++runs;
      int code = run_cli(c);
      if (code == 3) ++threes;
      if (code != 0) {
        ++other;
        if (notes.size() < 4) notes.push_back("exit " + std::to_string(code) + ": " + c);
      }
    }
  }
  std::string detail = std::to_string(files.size()) + " corpus files, " + std::to_string(runs) + " runs, " +
                       std::to_string(threes) + " exit code 3, " + std::to_string(other) + " nonzero";
  for (const auto& n : notes) detail += "; " + n;
  return {threes == 0 && other == 0 && runs > 0, detail};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Result()>& fn) {
    Result o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail << std::endl;
  };
  report(1, "R_- table fidelity", table_fidelity);
  auto corpus = gph_corpus();
  report(2, "reduction to the critical cone", [&] { return critical_cone_reduction(corpus); });
  report(3, "face-pair normal formula vs strata", [&] { return face_pair_formula(corpus); });
  std::optional<OracleRun> run;
  try {
    run = run_oracles();
  } catch (const std::exception& e) {
    std::cout << "oracle suite aborted: " << e.what() << std::endl;
  }
  report(4, "tangent and second order tangent probes", [&] {
    if (!run) return Result{false, "oracle suite did not run"};
    return tangent_agreement(*run);
  });
  report(5, "curvature vs liminf estimate", [&] {
    if (!run) return Result{false, "oracle suite did not run"};
    return curvature_agreement(*run);
  });
  report(6, "second order sufficiency end to end", end_to_end);
  report(7, "MPVI reduction consistency", mpvi_consistency);
  report(8, "derivative exactness", derivative_exactness);
  report(9, "contract sentinels on the corpus", contract_sentinels);
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}
