#include "conestab/json_io.hpp"
#include "conestab/repro.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace conestab;

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitInput = 2;

struct Common {
  double tol = 1e-8;
  std::string report = "text";

  Tol tolerance() const {
    Tol t;
    t.membership = tol;
    t.zero = tol * 0.1;
    t.validate();
    return t;
  }
};

void emit(const Report& r, const Common& c) {
  std::cout << (c.report == "json" ? report_to_json(r) + "\n" : report_to_text(r));
}

PointSpec pick_point(const ProblemSpec& spec, const std::string& point_file) {
  if (!point_file.empty()) return point_from_json(read_file(point_file), spec.sys);
  if (const auto it = spec.points.find("xbar"); it != spec.points.end()) return it->second;
  if (!spec.points.empty()) return spec.points.begin()->second;
  throw InputError("no point given: pass --point or add \"points\" to the problem file");
}

Certificate skipped(const std::string& why) {
  Certificate c;
  c.method = "skipped";
  c.detail = why;
  return c;
}

int cmd_analyze(const std::string& problem_file, const std::string& point_file, const Common& c) {
  const Tol tol = c.tolerance();
  const ProblemSpec spec = problem_from_json(read_file(problem_file));
  const PointSpec pt = pick_point(spec, point_file);
  const Vec v = pt.v.value_or(Vec::Zero(spec.sys.domain_dim()));
  require_feasible(spec.sys, pt.x, tol);

  Report r;
  r.command = "analyze " + spec.sys.name;
  Certificate feas;
  feas.verdict = Verdict::holds;
  feas.method = "dist(g(x), K)";
  feas.residual = dist(spec.sys.cone, spec.sys.value(pt.x));
  feas.tol = tol;
  r.entries.push_back({"feasibility", feas});

  const MultiplierSolveResult ms = multiplier_solve(spec.sys, pt.x, v, tol);
  r.entries.push_back({"multiplier_existence", ms.existence});
  if (ms.found) {
    r.entries.push_back({"srcq", ms.uniqueness});
  } else {
    r.entries.push_back({"srcq", skipped("no multiplier available")});
  }
  r.entries.push_back({"nondegeneracy", nondegeneracy_check(spec.sys, pt.x, tol)});
  try {
    r.entries.push_back({"strict_complementarity", strict_complementarity_check(spec.sys, pt.x, v, tol, pt.lambda)});
  } catch (const PreconditionError& e) {
    r.entries.push_back({"strict_complementarity", skipped(e.what())});
  }
  if (spec.ge) {
    const GEProblem& ge = *spec.ge;
    const MultiplierSolveResult gm = multiplier_solve(ge.sys, ge.xbar, ge.vbar(), tol);
    if (gm.found) {
      r.entries.push_back({"isolated_calm", solution_map_isolated_calm(ge, gm.lambda, tol)});
    } else {
      r.entries.push_back({"isolated_calm", skipped("reference point does not solve the generalized equation")});
    }
  }
  if (ms.found && ms.members.size() > 1) {
    r.notes.push_back("multiplier set is not a singleton: " + std::to_string(ms.members.size()) + " members found");
  }
  emit(r, c);
  return kExitOk;
}

int cmd_gderiv(const std::string& problem_file, const std::string& pair_file, const std::string& route_name,
               const Common& c) {
  const Tol tol = c.tolerance();
  const ProblemSpec spec = problem_from_json(read_file(problem_file));
  const PointSpec pt = pick_point(spec, pair_file);
  if (!pt.d || !pt.w) throw InputError("field 'pair': both \"d\" and \"w\" are required");
  const Vec v = pt.v.value_or(Vec::Zero(spec.sys.domain_dim()));
  const Route route = route_name == "a" ? Route::a : route_name == "b" ? Route::b : Route::both;
  Vec lambda;
  if (pt.lambda) {
    lambda = *pt.lambda;
  } else {
    const MultiplierSolveResult ms = multiplier_solve(spec.sys, pt.x, v, tol);
    if (!ms.found) throw PreconditionError("no multiplier for (x, v): " + ms.existence.detail);
    lambda = ms.lambda;
  }
  const GraphDerivResult g = ngamma_graph_deriv(spec.sys, pt.x, v, lambda, *pt.d, *pt.w, tol, route);
  Report r;
  r.command = "gderiv " + spec.sys.name;
  r.entries.push_back({"graph_derivative", g.combined});
  if (route != Route::b) r.entries.push_back({"route_a", g.route_a});
  if (g.route_b) r.entries.push_back({"route_b", *g.route_b});
  if (!g.routes_agree) r.notes.push_back("routes disagree");
  emit(r, c);
  return kExitOk;
}

int cmd_repro(const std::string& name, const Common& c) {
  const Tol tol = c.tolerance();
  std::vector<std::string> names;
  if (name == "all") {
    names = repro_names();
  } else {
    names = {name};
  }
  bool ok = true;
  for (const auto& n : names) {
    const ReproResult res = run_repro(n, tol);
    ok = ok && res.ok();
    if (c.report == "json") {
      std::cout << report_to_json(res.report) << "\n";
    } else {
      std::cout << repro_to_text(res);
    }
  }
  return ok ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability certificates for conic constraint systems"};
  app.require_subcommand(1);
  Common common;
  const auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--tol", common.tol, "membership tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--report", common.report, "text or json")->check(CLI::IsMember({"text", "json"}));
  };

  std::string problem;
  std::string point;
  std::string pair;
  std::string route = "both";
  std::string scenario;

  CLI::App* analyze = app.add_subcommand("analyze", "run the constraint-qualification pipeline at a point");
  analyze->add_option("--problem", problem, "problem JSON")->required();
  analyze->add_option("--point", point, "point JSON");
  add_common(analyze);

  CLI::App* gderiv = app.add_subcommand("gderiv", "decide (d, w) in the graphical derivative of the normal map");
  gderiv->add_option("--problem", problem, "problem JSON")->required();
  gderiv->add_option("--pair", pair, "pair JSON with x, v, d, w and optionally lambda");
  gderiv->add_option("--route", route, "a, b or both")->check(CLI::IsMember({"a", "b", "both"}));
  add_common(gderiv);

  CLI::App* repro = app.add_subcommand("repro", "run a named regression scenario");
  std::vector<std::string> choices = repro_names();
  choices.emplace_back("all");
  repro->add_option("name", scenario, "scenario name")->required()->check(CLI::IsMember(choices));
  add_common(repro);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(problem, point, common);
    if (gderiv->parsed()) return cmd_gderiv(problem, pair, route, common);
    return cmd_repro(scenario, common);
  } catch (const std::invalid_argument& e) {  // InputError, DimensionError
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::domain_error& e) {  // PreconditionError
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
