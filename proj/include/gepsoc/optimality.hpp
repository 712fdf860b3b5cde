#pragma once

// Second-order necessary and sufficient conditions for
//   min f(x)  s.t.  0 in F(x) + b(x)^T N_P(g(x))
// at a candidate point, and the reduction of variational-inequality
// constrained programs (P = R^l_-, b = grad_y psi) to that form.

#include <gepsoc/omega_geometry.hpp>

#include <random>

namespace gepsoc {

struct GepProblem {
  PolyMap f;  // n -> 1
  PolyMap F;  // n -> m
  PolyMap g;  // n -> l
  PolyMap b;  // n -> l*m, row-major l x m
  ConvexPolyhedron P;

  std::size_t n() const { return f.dim_in(); }
  std::size_t l() const { return P.dim(); }
  std::size_t m() const { return F.dim_out(); }

  void validate() const {
    require_dim(f.dim_out() == 1, "objective must be scalar");
    require_dim(F.dim_in() == n() && g.dim_in() == n() && b.dim_in() == n(), "problem maps disagree on n");
    require_dim(g.dim_out() == l(), "g output dimension differs from dim P");
    require_dim(b.dim_out() == l() * m(), "b must have l*m components");
  }
};

struct MpviProblem {
  std::size_t n1 = 0, n2 = 0;
  PolyMap f;    // n1+n2 -> 1
  PolyMap F;    // n1+n2 -> n2
  PolyMap psi;  // n1+n2 -> l, convex in y (attested by the user)
  bool convex_in_y_attested = false;
};

struct EtaStar {
  enum class Status { Unique, NoSolution, MultipleSolutions };
  Status status = Status::NoSolution;
  Vec eta;
};

/// The eta* in N_P(g(xbar)) with F(xbar) + b(xbar)^T eta* = 0.
inline EtaStar compute_eta_star(const PolyMap& F, const PolyMap& b, const PolyMap& g, const ConvexPolyhedron& p,
                                const Vec& xbar) {
  Vec gx = g.eval(xbar);
  EtaStar r;
  if (!p.contains(gx)) return r;
  std::size_t l = p.dim(), m = F.dim_out();
  Mat bt = eval_matrix(b, xbar, l, m).transpose();
  Vec rhs = -F.eval(xbar);
  std::vector<HalfSpace> eq;
  for (std::size_t j = 0; j < m; ++j) eq.push_back({bt.row(j), rhs[j]});
  auto s = ConvexPolyhedron::from_cone(p.normal_at(gx)).intersect(ConvexPolyhedron::from_hrep(l, {}, eq));
  if (s.is_empty()) return r;
  auto v = s.vertices();
  if (v.size() != 1 || !s.rays().empty() || !s.lineality().empty()) {
    r.status = EtaStar::Status::MultipleSolutions;
    return r;
  }
  r.status = EtaStar::Status::Unique;
  r.eta = v.front();
  return r;
}

struct CriticalDirection {
  Vec d, estar;
  std::size_t piece = 0;
};

struct CriticalPiece {
  std::size_t piece = 0;  // index into the tangent_gph pieces
  ConvexCone cone;        // critical directions whose (grad g d, e*) lies in the piece
  Vec representative;
};

struct MultiplierCertificate {
  Rat alpha;
  Vec lambda, tau;
  std::size_t piece = 0;
  Rat value;
};

enum class Mode { Necessary, Sufficient };

enum class Outcome { Pass, Fail, Unqualified, NotCritical };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Unqualified: return "unqualified";
    default: return "not_critical";
  }
}

struct DirectionRecord {
  Vec d;
  std::string source;  // "user", "representative" or "sample"
  Outcome outcome = Outcome::NotCritical;
  std::optional<CriticalDirection> critical;
  bool qualified = false;
  std::vector<MultiplierCertificate> certificates;
  std::optional<Rat> best_value;  // largest second order value found (if bounded)
};

struct Verdict {
  Mode mode = Mode::Necessary;
  AssumptionReport assumptions;
  Vec eta_star;
  std::vector<DirectionRecord> records;
  // necessary: violated, satisfied, satisfied on qualified directions, inconclusive
  // sufficient: certified, not certified
  std::string conclusion;
  std::vector<std::string> caveats;

  bool certified() const { return conclusion == "certified"; }
  bool violated() const { return conclusion == "violated"; }
};

struct CheckOptions {
  bool fast_path = false;
  std::size_t samples_per_piece = 0;
  std::uint64_t seed = 1;
};

class GepChecker {
 public:
  GepChecker(GepProblem prob, Vec xbar, bool fast_path = false) : prob_(std::move(prob)), xbar_(std::move(xbar)) {
    prob_.validate();
    require_dim(xbar_.size() == prob_.n(), "candidate point has wrong length");
    assumptions_ = check_basic_assumptions(prob_.g, prob_.b, prob_.P, xbar_);
    if (!assumptions_.g_ok || !assumptions_.b_ok) throw Error("basic injectivity assumptions fail at the candidate");
    auto eta = compute_eta_star(prob_.F, prob_.b, prob_.g, prob_.P, xbar_);
    if (eta.status == EtaStar::Status::NoSolution) throw Error("candidate point is infeasible");
    if (eta.status == EtaStar::Status::MultipleSolutions)
      throw ContractViolation("eta* is not unique although the injectivity assumptions hold");
    eta_ = eta.eta;
    ctx_.emplace(prob_.g, prob_.b, prob_.P, xbar_, eta_, fast_path);
    std::size_t l = prob_.l(), m = prob_.m();
    grad_f_ = prob_.f.jacobian(xbar_).row(0);
    jF_ = prob_.F.jacobian(xbar_);
    mmat_ = jF_.transpose() + ctx_->grad_b_dstar().transpose();
    lift_ = vstack(hstack(Mat(l, m), Mat::identity(l)), hstack(ctx_->b_at(), Mat(l, l)));
  }

  const GepProblem& problem() const { return prob_; }
  const Vec& xbar() const { return xbar_; }
  const Vec& eta_star() const { return eta_; }
  const AssumptionReport& assumptions() const { return assumptions_; }
  const OmegaContext& omega() const { return *ctx_; }

  /// grad F^T + grad(b^T eta*)^T, the n x m matrix acting on lambda.
  const Mat& lambda_map() const { return mmat_; }

  std::optional<CriticalDirection> is_critical(const Vec& d) const {
    require_dim(d.size() == prob_.n(), "direction has wrong length");
    if (sgn(dot(grad_f_, d)) > 0) return std::nullopt;
    auto w = ctx_->recover_ue(concat(d, -(jF_ * d)));
    if (!w) return std::nullopt;
    return CriticalDirection{d, w->estar, w->piece};
  }

  std::vector<CriticalPiece> enumerate_critical_pieces() const {
    std::size_t n = prob_.n(), l = prob_.l(), m = prob_.m();
    const auto& t = ctx_->tangent_gph_pieces();
    // (d, e*) with (grad g d, e*) in the piece, grad F d + grad(b^T eta*) d + b^T e* = 0, grad f d <= 0
    Mat lift = vstack(hstack(ctx_->grad_g(), Mat(l, l)), hstack(Mat(l, n), Mat::identity(l)));
    Mat lin = hstack(jF_ + ctx_->grad_b_dstar(), ctx_->b_at().transpose());
    Mat proj = hstack(Mat::identity(n), Mat(n, l));
    std::vector<CriticalPiece> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
      auto c = t.pieces()[i].preimage(lift);
      for (std::size_t j = 0; j < m; ++j) c = c.with_equality(lin.row(j));
      c = c.with_inequality(concat(grad_f_, zeros(l)));
      auto dc = c.image(proj);
      if (dc.is_zero()) continue;
      Vec rep = dc.relint_point();
      for (const auto& v : dc.lineality()) rep = rep + v;
      out.push_back({i, std::move(dc), std::move(rep)});
    }
    return out;
  }

  /// Seeded rational samples from a critical piece (nonnegative ray
  /// combinations plus lineality combinations), zero excluded.
  std::vector<Vec> sample_piece(const CriticalPiece& p, std::size_t count, std::mt19937_64& rng) const {
    std::vector<Vec> out;
    std::uniform_int_distribution<int> ray_coef(0, 4), lin_coef(-3, 3);
    for (std::size_t tries = 0; out.size() < count && tries < 20 * count + 20; ++tries) {
      Vec d = zeros(prob_.n());
      for (const auto& r : p.cone.rays()) d = d + Rat(ray_coef(rng)) * r;
      for (const auto& v : p.cone.lineality()) d = d + Rat(lin_coef(rng)) * v;
      if (!is_zero(d)) out.push_back(std::move(d));
    }
    return out;
  }

  ConeUnion limiting_pieces(const CriticalDirection& cd) const {
    return ctx_->normal_pieces(witness(cd), NormalRegime::Limiting);
  }
  ConvexCone regular_cone(const CriticalDirection& cd) const {
    return ctx_->normal_pieces(witness(cd), NormalRegime::RegularOfTangent).pieces().front();
  }

  /// M lambda - grad g^T tau* = 0 with (tau*, b lambda) in a limiting piece
  /// forces lambda = 0.
  bool check_qualification(const CriticalDirection& cd) const {
    std::size_t m = prob_.m();
    auto pieces = limiting_pieces(cd);
    for (const auto& k : pieces.pieces()) {
      auto q = homogeneous_system(k, Rat(0));
      for (const auto& r : q.rays())
        if (!is_zero(slice(r, 0, m))) return false;
      for (const auto& v : q.lineality())
        if (!is_zero(slice(v, 0, m))) return false;
    }
    return true;
  }

  /// alpha grad^2 f(d,d) - <lambda, grad^2 F(d,d) + grad^2 b(d,d)^T eta* + 2 (grad b d)^T e*> + <tau*, grad^2 g(d,d)>.
  Rat second_order_value(const CriticalDirection& cd, const Vec& lambda, const Vec& tau, const Rat& alpha) const {
    auto [c0, c] = value_coefficients(cd);
    return alpha * c0 + dot(c, concat(lambda, tau));
  }

  /// One certificate per limiting piece with a nonempty multiplier set,
  /// maximizing the second order value within the piece.
  std::vector<MultiplierCertificate> solve_multipliers_necessary(const CriticalDirection& cd) const {
    auto pieces = limiting_pieces(cd);
    std::vector<MultiplierCertificate> out;
    for (std::size_t i = 0; i < pieces.size(); ++i)
      if (auto c = best_certificate(cd, pieces.pieces()[i], Rat(1), i, Rat(0))) out.push_back(*c);
    return out;
  }

  /// A certificate with alpha in {0, 1} and strictly positive value, if any.
  std::optional<MultiplierCertificate> solve_multipliers_sufficient(const CriticalDirection& cd) const {
    auto k = regular_cone(cd);
    if (auto c = best_certificate(cd, k, Rat(1), 0, Rat(1)); c && sgn(c->value) > 0) return c;
    // alpha = 0: a nonzero element of the homogeneous system with positive value
    auto q = homogeneous_system(k, Rat(0));
    auto [c0, coef] = value_coefficients(cd);
    (void)c0;
    std::size_t m = prob_.m(), l = prob_.l();
    auto make = [&](const Vec& v) {
      return MultiplierCertificate{Rat(0), slice(v, 0, m), slice(v, m, l), 0, dot(coef, v)};
    };
    for (const auto& r : q.rays())
      if (sgn(dot(coef, r)) > 0) return make(r);
    for (const auto& v : q.lineality()) {
      int s = sgn(dot(coef, v));
      if (s != 0) return make(s > 0 ? v : Vec(-v));
    }
    return std::nullopt;
  }

  /// Exact post hoc validation of a certificate against a cone constraint.
  bool certificate_valid(const CriticalDirection& cd, const MultiplierCertificate& c, const ConvexCone& k) const {
    if (sgn(c.alpha) < 0) return false;
    Vec res = c.alpha * grad_f_ - mmat_ * c.lambda + ctx_->grad_g().transpose() * c.tau;
    if (!is_zero(res)) return false;
    if (!k.contains(lift_ * concat(c.lambda, c.tau))) return false;
    return second_order_value(cd, c.lambda, c.tau, c.alpha) == c.value;
  }

  DirectionRecord necessary_record(const Vec& d, std::string source) const {
    DirectionRecord rec{d, std::move(source)};
    rec.critical = is_critical(d);
    if (!rec.critical) return rec;
    rec.qualified = check_qualification(*rec.critical);
    if (!rec.qualified) {
      rec.outcome = Outcome::Unqualified;
      return rec;
    }
    rec.certificates = solve_multipliers_necessary(*rec.critical);
    auto pieces = limiting_pieces(*rec.critical);
    for (const auto& c : rec.certificates)
      if (!certificate_valid(*rec.critical, c, pieces.pieces()[c.piece]))
        throw ContractViolation("necessary multiplier certificate failed validation");
    bool pass = false;
    for (const auto& c : rec.certificates) {
      if (!rec.best_value || *rec.best_value < c.value) rec.best_value = c.value;
      if (sgn(c.value) >= 0) pass = true;
    }
    rec.outcome = pass ? Outcome::Pass : Outcome::Fail;
    return rec;
  }

  DirectionRecord sufficient_record(const Vec& d, std::string source) const {
    DirectionRecord rec{d, std::move(source)};
    rec.critical = is_critical(d);
    if (!rec.critical) return rec;
    rec.qualified = true;
    auto c = solve_multipliers_sufficient(*rec.critical);
    if (c) {
      if (!certificate_valid(*rec.critical, *c, regular_cone(*rec.critical)))
        throw ContractViolation("sufficient multiplier certificate failed validation");
      rec.best_value = c->value;
      rec.certificates.push_back(*c);
    }
    rec.outcome = c ? Outcome::Pass : Outcome::Fail;
    return rec;
  }

  Verdict check_necessary(const std::optional<std::vector<Vec>>& directions, const CheckOptions& opt = {}) const {
    Verdict v = base_verdict(Mode::Necessary);
    for (const auto& [d, src] : directions_to_test(directions, opt))
      if (!is_zero(d)) v.records.push_back(necessary_record(d, src));
    bool fail = false, unq = false, pass = false;
    for (const auto& r : v.records) {
      fail = fail || r.outcome == Outcome::Fail;
      unq = unq || r.outcome == Outcome::Unqualified;
      pass = pass || r.outcome == Outcome::Pass;
    }
    // Unqualified directions never count as failures; they only weaken the claim.
    if (fail)
      v.conclusion = "violated";
    else if (!unq)
      v.conclusion = "satisfied";
    else
      v.conclusion = pass ? "satisfied on qualified directions" : "inconclusive";
    if (fail)
      v.caveats.push_back("a qualified critical direction admits no multiplier with nonnegative second order value; "
                          "the candidate is not a local minimizer");
    if (unq) v.caveats.push_back("some directions fail the qualification condition; the test is not licensed there");
    add_coverage_caveat(v, directions, opt);
    return v;
  }

  Verdict check_sufficient(const std::optional<std::vector<Vec>>& directions, const CheckOptions& opt = {}) const {
    Verdict v = base_verdict(Mode::Sufficient);
    for (const auto& [d, src] : directions_to_test(directions, opt))
      if (!is_zero(d)) v.records.push_back(sufficient_record(d, src));
    bool all = std::all_of(v.records.begin(), v.records.end(), [](const DirectionRecord& r) {
      return r.outcome == Outcome::Pass || r.outcome == Outcome::NotCritical;
    });
    v.conclusion = all ? "certified" : "not certified";
    if (all && std::none_of(v.records.begin(), v.records.end(),
                            [](const DirectionRecord& r) { return r.outcome == Outcome::Pass; }))
      v.caveats.push_back("no nonzero critical direction was found; certification is vacuous");
    add_coverage_caveat(v, directions, opt);
    return v;
  }

  Verdict check(Mode mode, const std::optional<std::vector<Vec>>& directions, const CheckOptions& opt = {}) const {
    return mode == Mode::Necessary ? check_necessary(directions, opt) : check_sufficient(directions, opt);
  }

 private:
  TangentWitness witness(const CriticalDirection& cd) const { return {cd.d, cd.estar, cd.piece}; }

  /// (alpha coefficient, coefficients on (lambda, tau)) of the second order value.
  std::pair<Rat, Vec> value_coefficients(const CriticalDirection& cd) const {
    std::size_t l = prob_.l(), m = prob_.m();
    const Vec& d = cd.d;
    Rat c0 = prob_.f.hessian_form(xbar_, d)[0];
    Mat hb = hessian_form_matrix(prob_.b, xbar_, d, l, m);
    Mat db = directional_matrix(prob_.b, xbar_, d, l, m);
    Vec cl = -(prob_.F.hessian_form(xbar_, d) + hb.transpose() * eta_ + Rat(2) * (db.transpose() * cd.estar));
    Vec ct = prob_.g.hessian_form(xbar_, d);
    return {c0, concat(cl, ct)};
  }

  /// {(lambda, tau*) : alpha grad f - M lambda + grad g^T tau* = 0, (tau*, b lambda) in k}.
  ConvexPolyhedron multiplier_polyhedron(const ConvexCone& k, const Rat& alpha) const {
    std::size_t n = prob_.n(), m = prob_.m(), l = prob_.l();
    Mat sys = hstack(Rat(-1) * mmat_, ctx_->grad_g().transpose());
    std::vector<HalfSpace> eq;
    for (std::size_t i = 0; i < n; ++i) eq.push_back({sys.row(i), -alpha * grad_f_[i]});
    return ConvexPolyhedron::from_cone(k.preimage(lift_)).intersect(ConvexPolyhedron::from_hrep(m + l, {}, eq));
  }
  ConvexCone homogeneous_system(const ConvexCone& k, const Rat&) const {
    Mat sys = hstack(Rat(-1) * mmat_, ctx_->grad_g().transpose());
    auto c = k.preimage(lift_);
    for (std::size_t i = 0; i < sys.rows(); ++i) c = c.with_equality(sys.row(i));
    return c;
  }

  /// Maximizes the second order value over one multiplier polyhedron; when
  /// unbounded, walks along the improving ray until the value reaches target.
  std::optional<MultiplierCertificate> best_certificate(const CriticalDirection& cd, const ConvexCone& k,
                                                        const Rat& alpha, std::size_t piece, const Rat& target) const {
    auto s = multiplier_polyhedron(k, alpha);
    if (s.is_empty()) return std::nullopt;
    auto [c0, coef] = value_coefficients(cd);
    auto opt = s.maximize(coef);
    std::size_t m = prob_.m(), l = prob_.l();
    Vec point;
    if (opt.status == LinearOptimum::Status::Optimal) {
      point = opt.point;
    } else {
      point = s.vertices().front();
      Rat base = alpha * c0 + dot(coef, point), slope = dot(coef, opt.ray);
      Rat steps = base >= target ? Rat(0) : Rat((target - base) / slope);
      mpz_class up;
      mpz_cdiv_q(up.get_mpz_t(), steps.get_num_mpz_t(), steps.get_den_mpz_t());
      point = point + Rat(up + 1) * opt.ray;
    }
    return MultiplierCertificate{alpha, slice(point, 0, m), slice(point, m, l), piece, alpha * c0 + dot(coef, point)};
  }

  std::vector<std::pair<Vec, std::string>> directions_to_test(const std::optional<std::vector<Vec>>& user,
                                                              const CheckOptions& opt) const {
    std::vector<std::pair<Vec, std::string>> out;
    if (user) {
      for (const auto& d : *user) out.push_back({d, "user"});
      return out;
    }
    std::mt19937_64 rng(opt.seed);
    for (const auto& p : enumerate_critical_pieces()) {
      out.push_back({p.representative, "representative"});
      for (auto& d : sample_piece(p, opt.samples_per_piece, rng)) {
        bool seen = std::any_of(out.begin(), out.end(), [&](const auto& e) { return e.first == d; });
        if (!seen) out.push_back({std::move(d), "sample"});
      }
    }
    return out;
  }

  Verdict base_verdict(Mode mode) const {
    Verdict v;
    v.mode = mode;
    v.assumptions = assumptions_;
    v.eta_star = eta_;
    return v;
  }

  void add_coverage_caveat(Verdict& v, const std::optional<std::vector<Vec>>& user, const CheckOptions& opt) const {
    if (user)
      v.caveats.push_back("tested on " + std::to_string(user->size()) + " user-supplied directions only");
    else
      v.caveats.push_back("tested on one relative-interior representative and " +
                          std::to_string(opt.samples_per_piece) +
                          " seeded samples per critical piece; other critical directions are not covered");
  }

  GepProblem prob_;
  Vec xbar_, eta_;
  AssumptionReport assumptions_;
  std::optional<OmegaContext> ctx_;
  Vec grad_f_;
  Mat jF_, mmat_, lift_;
};

// Variational-inequality constrained programs.

/// g = psi, b = grad_y psi (row-major l x n2), F = F, with variables (x, y).
inline GepProblem mpvi_reduce(const MpviProblem& mp) {
  std::size_t n = mp.n1 + mp.n2;
  require_dim(mp.f.dim_in() == n && mp.F.dim_in() == n && mp.psi.dim_in() == n, "MPVI maps disagree on n1+n2");
  require_dim(mp.F.dim_out() == mp.n2, "MPVI F must map to R^n2");
  std::size_t l = mp.psi.dim_out();
  std::vector<Polynomial> b;
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < mp.n2; ++j) b.push_back(mp.psi[i].partial(mp.n1 + j));
  return GepProblem{mp.f, mp.F, mp.psi, PolyMap(n, std::move(b)), nonpositive_orthant(l)};
}

/// grad_y psi(z)^T d* = 0 with d* supported on the active constraints forces
/// d* = 0, i.e. the active rows of grad_y psi(z) are linearly independent.
inline bool mpvi_nondegenerate(const MpviProblem& mp, const Vec& z) {
  Vec v = mp.psi.eval(z);
  Mat j = mp.psi.jacobian(z);
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (sgn(v[i]) > 0) throw Error("MPVI point violates psi <= 0");
    if (sgn(v[i]) == 0) rows.push_back(slice(j.row(i), mp.n1, mp.n2));
  }
  return rank_of_rows(rows, mp.n2) == rows.size();
}

inline Verdict mpvi_check(const MpviProblem& mp, const Vec& z, Mode mode, const CheckOptions& opt = {},
                          const std::optional<std::vector<Vec>>& directions = std::nullopt) {
  if (!mpvi_nondegenerate(mp, z)) throw Error("MPVI nondegeneracy condition fails at the candidate");
  auto gep = mpvi_reduce(mp);
  auto rep = check_basic_assumptions(gep.g, gep.b, gep.P, z);
  if (!rep.g_ok || !rep.b_ok) throw ContractViolation("MPVI nondegeneracy holds but the reduced assumptions fail");
  GepChecker chk(std::move(gep), z, true);
  auto v = chk.check(mode, directions, opt);
  if (!mp.convex_in_y_attested) v.caveats.push_back("convexity of psi in y is not attested by the problem file");
  return v;
}

}  // namespace gepsoc
