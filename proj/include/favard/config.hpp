// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

#include "favard/errors.hpp"
#include "favard/geom_core.hpp"
#include "favard/quadrature.hpp"

namespace favard {

// Tolerances, quadrature settings and the named constants of the structure
// pipeline. None of the constants is pinned by theory; all are knobs.
struct AnalysisConfig {
  double alpha = 0.01;       // minigraph angle tolerance
  double kappa = 0.1;        // coarse bucket exponent: M3 ~ alpha^-kappa
  double C_lip = 8.0;
  double C_sep = 64.0;
  double C_alp = 4.0;
  double C_thm = 1e6;
  double alpha0 = 0.05;      // largest admissible alpha
  double C_pipeline = 32.0;  // eps_1 = alpha * eps / C_pipeline in the single-graph cover
  double C0 = 1e-4;
  double witness_C = 16.0;   // inner tube halfwidth witness_C * alpha; ball separation alpha^{2 kappa} / witness_C
  double mass_multiplier = 1.0 / 64.0;  // stage mass thresholds are mass_multiplier * alpha^3
  double H_scale = 1.0;      // H = H_scale / (alpha * eps) in the Besicovitch alternative
  double eps_target = 0.1;
  double sample_step = 0.0;  // <= 0: total length / 2000
  bool alpha_from_eps = false;  // derive alpha = (eps / C_alp)^10
  QuadratureConfig quad;
  std::uint64_t seed = 0;

  // Constants sized for unit-scale scenes. The defaults above give M3 = 3 at
  // alpha = 0.01 and case_split rejects every input. Here kappa stays below
  // 1/6 so the heavy-ball separation alpha^{2 kappa} exceeds the length
  // alpha^{1/2 - kappa} a tube cuts from a transversal graph; M3 = 4.
  static AnalysisConfig desk_profile() {
    AnalysisConfig c;
    c.alpha = 0.01;
    c.kappa = 0.15;
    c.C_sep = 1.0;
    c.C_lip = 3.0;
    c.witness_C = 1.0;
    return c;
  }

  double step_for(const SegmentSet& E) const {
    if (sample_step > 0) return sample_step;
    const double L = E.total_length();
    return L > 0 ? L / 2000.0 : 1.0;
  }

  double effective_alpha(double eps) const {
    return alpha_from_eps ? std::pow(eps / C_alp, 10.0) : alpha;
  }

  void validate() const {
    auto bad = [](const char* what) { throw ValidationError("config", what); };
    if (!(alpha > 0)) bad("alpha must be positive");
    if (!(kappa > 0 && kappa < 1)) bad("kappa must lie in (0, 1)");
    if (!(C_lip >= 1 && C_sep >= 1 && C_alp >= 1 && C_thm >= 1 && C_pipeline >= 1 && witness_C >= 1))
      bad("named constants must be >= 1");
    if (!(alpha0 > 0)) bad("alpha0 must be positive");
    if (!(mass_multiplier > 0)) bad("mass_multiplier must be positive");
    if (!(H_scale > 0)) bad("H_scale must be positive");
    if (!(eps_target > 0)) bad("eps_target must be positive");
    if (quad.tol <= 0 || quad.initial_panels < 1 || quad.max_panels < quad.initial_panels) bad("bad quadrature settings");
    gauss_rule(quad.order);
  }
};

}  // namespace favard
