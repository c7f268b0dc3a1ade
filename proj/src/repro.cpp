#include "conestab/repro.hpp"

#include "conestab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace conestab {

Vec example1_point() { return (Vec(3) << -1.0, -1.0, 0.0).finished(); }

Vec example2_vhat() { return (Vec(3) << -1.0, 0.0, -1.0).finished(); }

Vec example2_lambda_hat() {
  Vec out(4);
  out << svec((Mat(2, 2) << -1.0, 0.0, 0.0, 0.0).finished()), 0.0;
  return out;
}

Vec example3_point() { return svec((Mat(2, 2) << 0.0, 0.0, 0.0, 1.0).finished()); }

Vec example3_v() { return svec((Mat(2, 2) << -1.0, 0.0, 0.0, 0.0).finished()); }

Vec example3_ri_multiplier() {
  Vec out(6);
  out << Vec::Zero(3), example3_v();
  return out;
}

Vec example41_multiplier() {
  Vec out(4);
  out << svec((Mat(2, 2) << -1.0, 1.0, 1.0, -1.0).finished()), 0.0;
  return out;
}

bool example2_normal_member(const Vec& v, const Tol& tol) {
  return multiplier_solve(example1_system(), example1_point(), v, tol, MultiplierSearch::existence_only)
      .existence.holds();
}

KktProblem kkt_lp_problem() {
  KktProblem p;
  p.n = 2;
  p.grad_f = [](const Vec&) { return Vec(Vec::Ones(2)); };
  p.hess_f = [](const Vec&) { return Mat(Mat::Zero(2, 2)); };
  p.constraint = affine_system(ConeDesc{Orthant{2, Sign::minus}}, -Mat::Identity(2, 2), Vec::Zero(2));
  return p;
}

KktProblem kkt_lp_degenerate_problem() {
  KktProblem p;
  p.n = 1;
  p.grad_f = [](const Vec&) { return Vec(Vec::Ones(1)); };
  p.hess_f = [](const Vec&) { return Mat(Mat::Zero(1, 1)); };
  p.constraint = affine_system(ConeDesc{Orthant{2, Sign::minus}}, -Mat::Ones(2, 1), Vec::Zero(2));
  return p;
}

KktProblem kkt_trivial_problem() {
  KktProblem p;
  p.n = 2;
  p.grad_f = [](const Vec& z) { return z; };
  p.hess_f = [](const Vec&) { return Mat(Mat::Identity(2, 2)); };
  p.constraint = affine_system(ConeDesc{FreeCone{1}}, Mat::Zero(1, 2), Vec::Zero(1));
  return p;
}

bool ReproResult::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ReproCheck& c) { return c.match(); });
}

const std::vector<std::string>& repro_names() {
  static const std::vector<std::string> names{"example1", "example2", "example3",
                                              "example41", "kkt_lp", "section32"};
  return names;
}

namespace {

class Runner {
 public:
  Runner(std::string scenario, const Tol& tol) : tol_(tol) {
    out_.scenario = scenario;
    out_.report.command = "repro " + scenario;
  }

  void cert(const std::string& name, const Certificate& c, Verdict expected) {
    out_.report.entries.push_back({name, c});
    out_.checks.push_back({name, to_string(expected), to_string(c.verdict)});
  }

  void flag(const std::string& name, bool observed, bool expected) {
    out_.checks.push_back({name, expected ? "true" : "false", observed ? "true" : "false"});
  }

  void note(const std::string& n) { out_.report.notes.push_back(n); }
  const Tol& tol() const { return tol_; }
  ReproResult take() { return std::move(out_); }

 private:
  Tol tol_;
  ReproResult out_;
};

void run_example1(Runner& r) {
  const ConstraintSystem sys = example1_system();
  const Vec x = example1_point();
  const Vec v = Vec::Zero(3);
  r.cert("strict_complementarity", strict_complementarity_check(sys, x, v, r.tol()), Verdict::fails);
  r.cert("srcq", srcq_check(sys, x, v, Vec::Zero(4), r.tol()), Verdict::holds);
  // N_K(g(x̄)) against S²₋ × R₋ on a fixed probe set.
  const ConeSet normal = normal_cone(sys.cone, sys.value(x), r.tol());
  const ConeDesc reference{Semidefinite{2, Sign::minus}, Orthant{1, Sign::minus}};
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  int agree = 0;
  constexpr int kProbes = 40;
  for (int i = 0; i < kProbes; ++i) {
    Vec z(4);
    for (int k = 0; k < 4; ++k) z(k) = nd(rng);
    if (i % 2 == 0) z = project(reference, z);
    if (normal.contains(z, r.tol()) == contains(reference, z, r.tol())) ++agree;
  }
  r.flag("normal_cone_table_matches", agree == kProbes, true);
  r.note("normal cone membership agreed on " + std::to_string(agree) + "/" + std::to_string(kProbes) + " probes");
}

void run_example2(Runner& r) {
  const ConstraintSystem sys = example1_system();
  const Vec x = example1_point();
  r.cert("srcq(vbar)", srcq_check(sys, x, Vec::Zero(3), Vec::Zero(4), r.tol()), Verdict::holds);
  const Certificate hat = srcq_check(sys, x, example2_vhat(), example2_lambda_hat(), r.tol());
  r.cert("srcq(vhat)", hat, Verdict::fails);
  bool witness_ok = false;
  if (hat.witness) {
    const Vec& wv = *hat.witness;
    const Mat h = smat(wv.head(3), 2);
    const bool in_kernel = (sys.adj_apply(x, wv)).norm() <= 1e-6 * wv.norm();
    witness_ok = wv.norm() > 0.0 && in_kernel && h(1, 1) <= 1e-8 && wv(3) <= 1e-8;
  }
  r.flag("srcq(vhat) witness in kernel and tangent set", witness_ok, true);

  const auto member = [&r](const Vec& v) { return example2_normal_member(v, r.tol()); };
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int inside = 0;
  int outside = 0;
  constexpr int kSamples = 10;
  for (int i = 0; i < kSamples; ++i) {
    const Vec in = (Vec(3) << -2.0 + 4.0 * u(rng), -2.0 + 1.5 * u(rng), -2.0 * u(rng)).finished();
    if (radial_probe(member, example2_vhat(), in)) ++inside;
    const Vec out = (Vec(3) << -2.0 + 4.0 * u(rng), 0.5 + 1.5 * u(rng), -2.0 + 4.0 * u(rng)).finished();
    if (!radial_probe(member, example2_vhat(), out)) ++outside;
  }
  r.flag("radial probe accepts sampled points with b < 0", inside == kSamples, true);
  r.flag("radial probe rejects sampled points with b > 0", outside == kSamples, true);
  r.note("radial probe: " + std::to_string(inside) + "/" + std::to_string(kSamples) + " accepted inside, " +
         std::to_string(outside) + "/" + std::to_string(kSamples) + " rejected outside");
}

void run_example3(Runner& r) {
  const ConstraintSystem sys = example3_system();
  const Vec x = example3_point();
  const Vec v = example3_v();
  const Certificate sc = strict_complementarity_check(sys, x, v, r.tol(), example3_ri_multiplier());
  r.cert("strict_complementarity", sc, Verdict::holds);
  const MultiplierSolveResult ms = multiplier_solve(sys, x, v, r.tol());
  r.cert("multiplier_uniqueness", ms.uniqueness, Verdict::fails);
  r.flag("two distinct verified multipliers", ms.members.size() >= 2, true);
  r.note("multiplier set members found: " + std::to_string(ms.members.size()));
}

void run_example41(Runner& r) {
  const GEProblem ge = example41_problem();
  const Vec lam = example41_multiplier();
  r.cert("srcq", srcq_check(ge.sys, ge.xbar, ge.vbar(), lam, r.tol()), Verdict::holds);
  r.cert("nondegeneracy", nondegeneracy_check(ge.sys, ge.xbar, r.tol()), Verdict::fails);
  r.cert("isolated_calm", solution_map_isolated_calm(ge, lam, r.tol()), Verdict::holds);
  r.cert("isolated_calm(tol/2)", solution_map_isolated_calm(ge, lam, r.tol().halved()), Verdict::holds);
}

void run_kkt_lp(Runner& r) {
  r.cert("lp_nondegenerate", kkt_isolated_calm(kkt_lp_problem(), Vec::Zero(2), Vec::Ones(2), r.tol()),
         Verdict::holds);
  const Certificate deg =
      kkt_isolated_calm(kkt_lp_degenerate_problem(), Vec::Zero(1), Vec::Constant(2, 0.5), r.tol());
  r.cert("lp_degenerate_dual", deg, Verdict::fails);
  r.flag("degenerate witness moves only the multiplier",
         deg.witness && std::abs((*deg.witness)(0)) <= 1e-8 && deg.witness->tail(2).norm() > 0.5, true);
  r.cert("trivial_quadratic", kkt_isolated_calm(kkt_trivial_problem(), Vec::Zero(2), Vec::Zero(1), r.tol()),
         Verdict::holds);
}

void run_section32(Runner& r) {
  const ConstraintSystem sys = section32_system();
  const PhiPoint center{Vec::Zero(1), Vec::Constant(1, 0.5), Vec::Zero(1)};
  std::vector<PhiPoint> seq;
  const std::vector<double> ks{10.0, 100.0, 1000.0};
  for (const double k : ks) {
    seq.push_back({Vec::Constant(1, 1.0 / k), Vec::Constant(1, 0.5), Vec::Constant(1, 1.0 / k)});
  }
  const std::vector<double> ratios = phi_subregularity_probe(sys, center, seq, section32_phi_distance, r.tol());
  bool exact = true;
  bool ratio_ok = true;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto [first, second] = phi_residual(sys, seq[i].x, seq[i].lambda, seq[i].v);
    const double x = seq[i].x(0);
    exact = exact && first(0) == 0.0 && second(0) == x * x;
    const double expected = 1.0 / (std::sqrt(2.0) * ks[i]);
    ratio_ok = ratio_ok && std::abs(ratios[i] - expected) <= 1e-12;
    std::ostringstream os;
    os << std::setprecision(6) << "k=" << ks[i] << "  |Phi| = " << std::hypot(first(0), second(0))
       << "  ratio = " << ratios[i] << "  1/(sqrt2 k) = " << expected;
    r.note(os.str());
  }
  r.flag("phi residual equals (0, x^2)", exact, true);
  r.flag("ratios equal 1/(sqrt2 k)", ratio_ok, true);
  r.flag("ratios decay", ratios[1] < ratios[0] && ratios[2] < ratios[1], true);
}

}  // namespace

ReproResult run_repro(const std::string& name, const Tol& tol) {
  tol.validate();
  Runner r(name, tol);
  if (name == "example1") run_example1(r);
  else if (name == "example2") run_example2(r);
  else if (name == "example3") run_example3(r);
  else if (name == "example41") run_example41(r);
  else if (name == "kkt_lp") run_kkt_lp(r);
  else if (name == "section32") run_section32(r);
  else throw std::invalid_argument("unknown scenario '" + name + "'");
  return r.take();
}

std::string repro_to_text(const ReproResult& r) {
  std::ostringstream os;
  os << report_to_text(r.report);
  std::size_t width = 0;
  for (const auto& c : r.checks) width = std::max(width, c.name.size());
  os << "  expected vs observed:\n";
  for (const auto& c : r.checks) {
    os << "    " << (c.match() ? "ok       " : "MISMATCH ") << c.name << std::string(width - c.name.size(), ' ')
       << "  expected " << c.expected << ", observed " << c.observed << "\n";
  }
  os << (r.ok() ? "  result: all checks match\n" : "  result: mismatch\n");
  return os.str();
}

}  // namespace conestab
