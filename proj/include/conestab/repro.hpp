#pragma once

#include "conestab/json_io.hpp"
#include "conestab/stability.hpp"

#include <string>
#include <vector>

namespace conestab {

// Reference data for the builtin scenarios.

/// Reference point (x̄, t̄) = (-1, -1, 0) of the example1 system.
Vec example1_point();
/// v̂ = ((-1, 0); -1) and its multiplier (diag(-1, 0), 0).
Vec example2_vhat();
Vec example2_lambda_hat();
/// Reference point X̄ = diag(0, 1), v̄ = diag(-1, 0) of the example3 system and the
/// relative-interior multiplier (0, diag(-1, 0)).
Vec example3_point();
Vec example3_v();
Vec example3_ri_multiplier();
/// Multiplier of the example41 problem: ([[-1, 1], [1, -1]], 0).
Vec example41_multiplier();

/// Membership in N_Γ(x̄) for the example1 system, decided through multiplier existence.
bool example2_normal_member(const Vec& v, const Tol& tol = {});

/// min z1 + z2 s.t. z >= 0 with (z̄, λ̄) = (0, (1, 1)).
KktProblem kkt_lp_problem();
/// min z s.t. z >= 0 written twice, (z̄, λ̄) = (0, (½, ½)).
KktProblem kkt_lp_degenerate_problem();
/// min ½|z|² with the trivial constraint 0 ∈ R, λ̄ = 0.
KktProblem kkt_trivial_problem();

struct ReproCheck {
  std::string name;
  std::string expected;
  std::string observed;
  bool match() const { return expected == observed; }
};

struct ReproResult {
  std::string scenario;
  std::vector<ReproCheck> checks;
  Report report;
  bool ok() const;
};

const std::vector<std::string>& repro_names();
/// Runs a named scenario; throws std::invalid_argument for unknown names.
ReproResult run_repro(const std::string& name, const Tol& tol = {});
std::string repro_to_text(const ReproResult& r);

}  // namespace conestab
