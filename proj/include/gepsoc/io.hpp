#pragma once

// JSON problem files and reports. Every scalar on an exact path is a string
// "p/q" (or a JSON integer); float literals are rejected.

#include <gepsoc/oracles.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace gepsoc::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kProblemSchema = "gepsoc-problem/1";
inline constexpr const char* kReportSchema = "gepsoc-report/1";

inline Rat rat_from_json(const json& j, const std::string& what) {
  if (j.is_string()) return parse_rat(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.dump());
  if (j.is_number_float()) throw Error("float literal rejected in " + what + "; write rationals as strings \"p/q\"");
  throw Error("expected a rational in " + what);
}

inline json to_json(const Rat& r) { return r.get_str(); }

inline json to_json(const ExtRat& r) { return r.str(); }

inline Vec vec_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error("expected an array of rationals in " + what);
  Vec v;
  for (const auto& e : j) v.push_back(rat_from_json(e, what));
  return v;
}

inline json to_json(const Vec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

inline json to_json(const std::vector<Vec>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

/// "1/2,-3,0" -> (1/2, -3, 0).
inline Vec parse_point(const std::string& s) {
  Vec v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    v.push_back(parse_rat(tok));
  }
  return v;
}

inline Polynomial poly_from_json(const json& j, std::size_t nvars, const std::string& what) {
  if (!j.is_array()) throw Error("expected a list of monomials in " + what);
  std::vector<Monomial> terms;
  for (const auto& t : j) {
    if (!t.is_object() || !t.contains("coeff") || !t.contains("exps")) throw Error("malformed monomial in " + what);
    Exponents e;
    for (const auto& k : t.at("exps")) {
      if (!k.is_number_unsigned() && !(k.is_number_integer() && k.get<long>() >= 0))
        throw Error("exponents must be nonnegative integers in " + what);
      e.push_back(k.get<unsigned>());
    }
    if (e.size() != nvars) throw DimensionError("monomial in " + what + " has " + std::to_string(e.size()) +
                                                " exponents, expected " + std::to_string(nvars));
    terms.push_back({rat_from_json(t.at("coeff"), what), e});
  }
  return Polynomial(nvars, terms);
}

inline json to_json(const Polynomial& p) {
  json a = json::array();
  for (const auto& t : p.terms()) a.push_back({{"coeff", to_json(t.coeff)}, {"exps", t.exps}});
  return a;
}

inline PolyMap map_from_json(const json& j, std::size_t nvars, std::size_t out, const std::string& what) {
  if (!j.is_array()) throw Error("expected a list of polynomials in " + what);
  if (j.size() != out)
    throw DimensionError(what + " has " + std::to_string(j.size()) + " components, expected " + std::to_string(out));
  std::vector<Polynomial> comps;
  for (std::size_t i = 0; i < j.size(); ++i) comps.push_back(poly_from_json(j[i], nvars, what));
  return PolyMap(nvars, std::move(comps));
}

inline json to_json(const PolyMap& p) {
  json a = json::array();
  for (const auto& c : p.components()) a.push_back(to_json(c));
  return a;
}

inline std::vector<HalfSpace> halfspaces_from_json(const json& j, std::size_t dim, const std::string& what) {
  std::vector<HalfSpace> out;
  if (j.is_null()) return out;
  for (const auto& h : j) {
    Vec a = vec_from_json(h.at("normal"), what);
    require_dim(a.size() == dim, what + ": normal has wrong length");
    out.push_back({std::move(a), rat_from_json(h.at("rhs"), what)});
  }
  return out;
}

inline json to_json(const std::vector<HalfSpace>& hs) {
  json a = json::array();
  for (const auto& h : hs) a.push_back({{"normal", to_json(h.normal)}, {"rhs", to_json(h.rhs)}});
  return a;
}

/// {"dim": l, "inequalities": [{"normal": [...], "rhs": ...}], "equalities": [...]}.
inline ConvexPolyhedron polyhedron_from_json(const json& j) {
  auto dim = j.at("dim").get<std::size_t>();
  auto hrep = j.contains("hrep") ? j.at("hrep") : j;
  return ConvexPolyhedron::from_hrep(dim, halfspaces_from_json(hrep.value("inequalities", json()), dim, "P"),
                                     halfspaces_from_json(hrep.value("equalities", json()), dim, "P"));
}

inline json to_json(const ConvexPolyhedron& p) {
  json j;
  j["dim"] = p.dim();
  j["empty"] = p.is_empty();
  j["hrep"] = {{"inequalities", to_json(p.inequalities())}, {"equalities", to_json(p.equalities())}};
  j["vrep"] = {{"vertices", to_json(p.vertices())}, {"rays", to_json(p.rays())}, {"lineality", to_json(p.lineality())}};
  return j;
}

inline json to_json(const ConvexCone& c) {
  json j;
  j["dim"] = c.dim();
  j["hrep"] = {{"inequalities", to_json(c.facets())}, {"equalities", to_json(c.equalities())}};
  j["vrep"] = {{"rays", to_json(c.rays())}, {"lineality", to_json(c.lineality())}};
  return j;
}

/// Cones are read back from their H-representation {a : a.x <= 0}.
inline ConvexCone cone_from_json(const json& j) {
  auto dim = j.at("dim").get<std::size_t>();
  std::vector<Vec> ineq, eq;
  for (const auto& a : j.at("hrep").at("inequalities")) ineq.push_back(vec_from_json(a, "cone"));
  for (const auto& a : j.at("hrep").at("equalities")) eq.push_back(vec_from_json(a, "cone"));
  return ConvexCone::from_hrep(dim, ineq, eq);
}

template <class Piece>
json to_json(const Union<Piece>& u) {
  json pieces = json::array();
  for (const auto& p : u.pieces()) pieces.push_back(to_json(p));
  return {{"dim", u.dim()}, {"pieces", pieces}};
}

inline ConeUnion cone_union_from_json(const json& j) {
  std::vector<ConvexCone> pieces;
  for (const auto& p : j.at("pieces")) pieces.push_back(cone_from_json(p));
  return ConeUnion(j.at("dim").get<std::size_t>(), std::move(pieces));
}

inline PolyhedronUnion polyhedron_union_from_json(const json& j) {
  std::vector<ConvexPolyhedron> pieces;
  for (const auto& p : j.at("pieces")) pieces.push_back(polyhedron_from_json(p));
  return PolyhedronUnion(j.at("dim").get<std::size_t>(), std::move(pieces));
}

inline oracle::Chart chart_from_json(const json& j, std::size_t ambient) {
  auto base = vec_from_json(j.at("base"), "chart base");
  std::size_t k = base.size();
  oracle::Chart c{map_from_json(j.at("map"), k, ambient, "chart map"), {}, {}, base};
  auto bounds = [&](const char* key) {
    std::vector<std::optional<Rat>> out(k);
    if (!j.contains(key)) return out;
    const auto& a = j.at(key);
    require_dim(a.size() == k, std::string("chart ") + key + " has wrong length");
    for (std::size_t i = 0; i < k; ++i)
      if (!a[i].is_null()) out[i] = rat_from_json(a[i], "chart bound");
    return out;
  };
  c.lo = bounds("lo");
  c.hi = bounds("hi");
  return c;
}

inline json to_json(const oracle::Chart& c) {
  auto bounds = [](const std::vector<std::optional<Rat>>& b) {
    json a = json::array();
    for (const auto& x : b) a.push_back(x ? to_json(*x) : json(nullptr));
    return a;
  };
  return {{"map", to_json(c.map)}, {"lo", bounds(c.lo)}, {"hi", bounds(c.hi)}, {"base", to_json(c.base)}};
}

struct GridSpec {
  std::vector<double> lo, hi;
  double step = 0.01;
};

struct Fixtures {
  std::optional<oracle::Parameterization> omega;  // charts of Omega through (xbar, -F(xbar))
  std::optional<GridSpec> grid;
};

struct ProblemFile {
  std::string kind;  // "gep" or "mpvi"
  std::string name;
  std::optional<GepProblem> gep;
  std::optional<MpviProblem> mpvi;
  std::optional<Vec> point;
  std::vector<Vec> directions;
  Fixtures fixtures;
  json source;

  /// The generalized equation form (MPVI files are reduced).
  GepProblem problem() const { return gep ? *gep : mpvi_reduce(*mpvi); }
  bool is_mpvi() const { return kind == "mpvi"; }
};

inline double double_from_json(const json& j, const std::string& what) {
  // oracle-only fields accept rationals as well as plain numbers
  if (j.is_number()) return j.get<double>();
  return rat_from_json(j, what).get_d();
}

inline ProblemFile parse_problem(const json& j) {
  ProblemFile f;
  f.source = j;
  if (!j.is_object()) throw Error("problem file must be a JSON object");
  if (j.value("schema", std::string(kProblemSchema)) != kProblemSchema)
    throw Error("unsupported problem schema " + j.at("schema").dump());
  f.kind = j.value("kind", std::string("gep"));
  f.name = j.value("name", std::string());
  std::size_t n = 0;
  if (f.kind == "gep") {
    n = j.at("n").get<std::size_t>();
    auto p = polyhedron_from_json(j.at("P"));
    std::size_t l = p.dim(), m = j.at("m").get<std::size_t>();
    f.gep = GepProblem{map_from_json(j.at("f"), n, 1, "f"), map_from_json(j.at("F"), n, m, "F"),
                       map_from_json(j.at("g"), n, l, "g"), map_from_json(j.at("b"), n, l * m, "b"), p};
  } else if (f.kind == "mpvi") {
    MpviProblem mp;
    mp.n1 = j.at("n1").get<std::size_t>();
    mp.n2 = j.at("n2").get<std::size_t>();
    n = mp.n1 + mp.n2;
    std::size_t l = j.at("l").get<std::size_t>();
    mp.f = map_from_json(j.at("f"), n, 1, "f");
    mp.F = map_from_json(j.at("F"), n, mp.n2, "F");
    mp.psi = map_from_json(j.at("psi"), n, l, "psi");
    mp.convex_in_y_attested = j.value("convex_in_y", false);
    f.mpvi = mp;
  } else {
    throw Error("unknown problem kind '" + f.kind + "'");
  }
  if (j.contains("point")) {
    f.point = vec_from_json(j.at("point"), "point");
    require_dim(f.point->size() == n, "point has wrong length");
  }
  for (const auto& d : j.value("directions", json::array())) {
    f.directions.push_back(vec_from_json(d, "directions"));
    require_dim(f.directions.back().size() == n, "direction has wrong length");
  }
  if (j.contains("fixtures")) {
    const auto& fx = j.at("fixtures");
    if (fx.contains("omega_charts")) {
      const auto& oc = fx.at("omega_charts");
      Vec ref = vec_from_json(oc.at("reference"), "chart reference");
      std::vector<oracle::Chart> charts;
      for (const auto& c : oc.at("charts")) charts.push_back(chart_from_json(c, ref.size()));
      f.fixtures.omega.emplace(std::move(ref), std::move(charts));
    }
    if (fx.contains("grid")) {
      const auto& g = fx.at("grid");
      GridSpec s;
      for (const auto& x : g.at("lo")) s.lo.push_back(double_from_json(x, "grid"));
      for (const auto& x : g.at("hi")) s.hi.push_back(double_from_json(x, "grid"));
      s.step = double_from_json(g.at("step"), "grid");
      require_dim(s.lo.size() == n && s.hi.size() == n, "grid box has wrong length");
      f.fixtures.grid = s;
    }
  }
  return f;
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open problem file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed JSON in " + path + ": " + e.what());
  }
  return parse_problem(j);
}

inline json to_json(const AssumptionReport& a) {
  return {{"g_ok", a.g_ok}, {"b_ok", a.b_ok}, {"span_basis", to_json(a.span_basis)}};
}

inline json to_json(const MultiplierCertificate& c) {
  return {{"alpha", to_json(c.alpha)},
          {"lambda", to_json(c.lambda)},
          {"tau", to_json(c.tau)},
          {"piece", c.piece},
          {"value", to_json(c.value)}};
}

inline json to_json(const DirectionRecord& r) {
  json j{{"d", to_json(r.d)}, {"source", r.source}, {"outcome", to_string(r.outcome)}};
  j["critical"] = r.critical.has_value();
  if (r.critical) {
    j["estar"] = to_json(r.critical->estar);
    j["tangent_piece"] = r.critical->piece;
    j["qualified"] = r.qualified;
  }
  json certs = json::array();
  for (const auto& c : r.certificates) certs.push_back(to_json(c));
  j["certificates"] = certs;
  j["best_value"] = r.best_value ? to_json(*r.best_value) : json(nullptr);
  return j;
}

inline json to_json(const Verdict& v) {
  json recs = json::array();
  for (const auto& r : v.records) recs.push_back(to_json(r));
  return {{"mode", v.mode == Mode::Necessary ? "necessary" : "sufficient"},
          {"conclusion", v.conclusion},
          {"assumptions", to_json(v.assumptions)},
          {"eta_star", to_json(v.eta_star)},
          {"directions", recs},
          {"caveats", v.caveats}};
}

inline json to_json(const oracle::ResidualProfile& p) {
  return {{"t", p.t}, {"residual", p.residual}, {"accepted", p.accepted}};
}

inline json to_json(const oracle::GridEstimate& g) {
  return {{"beta", g.beta}, {"witness", g.witness}, {"objective_gap", g.objective_gap}, {"distance", g.distance}};
}

}  // namespace gepsoc::io
