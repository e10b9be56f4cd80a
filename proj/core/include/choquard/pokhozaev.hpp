#pragma once

#include "choquard/energy.hpp"
#include "choquard/grid.hpp"

namespace choquard {

struct PokhozaevReport {
  double term_gradient = 0;  // (d-2)/2 ||grad u||^2
  double term_mass = 0;      // (d/2) lambda ||u||^2
  double term_w = 0;         // (g/4) int u^2 (W * u^2)
  double term_v = 0;         // (d/2) g int u^2 (V * u^2)
  double lhs = 0;            // term_gradient + term_mass
  double rhs = 0;            // term_w + term_v
  double relative_residual = 0;  // |lhs - rhs| / (1 + max |term|)
};

/// Virial-type identity satisfied by critical points of the constrained
/// functional. No assertion: callers judge the residual. Requires a
/// differentiable symmetric potential.
PokhozaevReport pokhozaev_residual(const Field& u, double lambda, double g,
                                   const SampledPotential& V);

/// int (F * u^2) u^2 with F = V/2 + W/4 (d = 2). Strictly positive for
/// radial non-increasing states under the standing kernel assumptions,
/// which is what rules out a minimizer at the critical coupling.
double two_d_F_pairing(const Field& u, const SampledPotential& V);

struct AutocorrelationReport {
  bool monotone = false;
  double worst_violation = 0;  // largest shell-mean increase found
  double slack = 0;            // 1e-8 * max h
  int shells = 0;
};

/// Shell-averaged monotonicity of h = u^2 * u^2 for radial non-increasing
/// u (apply rearrange_decreasing first), checked on radii below L/2.
AutocorrelationReport autocorrelation_monotone_check(const Field& u);

}  // namespace choquard
