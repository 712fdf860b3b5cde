#include "commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace gepsoc;

namespace {

int emit(const cli::json& report, const std::string& out) {
  std::string text = report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out);
    f << text;
  }
  return cli::kCompleted;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact second-order optimality certification for generalized equation constrained programs"};
  app.set_version_flag("--version", GEPSOC_VERSION);
  app.require_subcommand(1);
  std::string out;

  cli::GeometryArgs geo;
  auto* g = app.add_subcommand("geometry", "tangent, normal, second order tangent and curvature objects of Omega");
  g->add_option("--problem", geo.problem, "problem file (JSON)")->required()->check(CLI::ExistingFile);
  g->add_option("--point", geo.point, "candidate point \"p/q,...\" (defaults to the file's point)");
  g->add_option("--query", geo.query, "tangent | normal_dir | second_tangent | curvature")
      ->check(CLI::IsMember({"tangent", "normal_dir", "second_tangent", "curvature"}));
  g->add_option("--direction", geo.direction, "direction in R^{n+m}");
  g->add_option("--covector", geo.covector, "covector in R^{n+m}");
  g->add_option("--regime", geo.regime, "limiting | regular")->check(CLI::IsMember({"limiting", "regular"}));
  g->add_flag("--fast", geo.fast, "closed-form tables when P is a nonpositive orthant");
  g->add_option("--seed", geo.seed, "seed echoed in the report");
  g->add_option("--out", out, "write the report here instead of stdout");

  cli::CheckArgs chk;
  auto* c = app.add_subcommand("check", "second-order necessary or sufficient optimality check");
  c->add_option("--problem", chk.problem, "problem file (JSON)")->required()->check(CLI::ExistingFile);
  c->add_option("--point", chk.point, "candidate point \"p/q,...\" (defaults to the file's point)");
  c->add_option("--mode", chk.mode, "necessary | sufficient")->check(CLI::IsMember({"necessary", "sufficient"}));
  c->add_option("--direction", chk.directions, "critical direction to test (repeatable)");
  c->add_option("--samples", chk.samples, "seeded random directions per critical piece");
  c->add_option("--seed", chk.seed, "sampling seed");
  c->add_flag("--with-oracle", chk.with_oracle, "run the essential-minimizer grid oracle");
  c->add_flag("--fast", chk.fast, "closed-form tables when P is a nonpositive orthant");
  c->add_option("--out", out, "write the report here instead of stdout");

  cli::ValidateArgs val;
  auto* v = app.add_subcommand("validate", "run the floating-point oracles against the exact objects");
  v->add_option("--problem", val.problem, "problem file (JSON) with omega_charts fixtures")->required()->check(CLI::ExistingFile);
  v->add_option("--seed", val.seed, "oracle seed");
  v->add_option("--out", out, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? cli::kCompleted : cli::kInputError;
  }

  try {
    if (*g) return emit(cli::cmd_geometry(geo), out);
    if (*c) return emit(cli::cmd_check(chk), out);
    return emit(cli::cmd_validate(val), out);
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return cli::kContractViolation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return cli::kContractViolation;
  }
}
