#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "choquard/energy.hpp"
#include "choquard/groundstate.hpp"

namespace choquard {

struct ProbeRecord {
  double g = 0;
  double e = 0;      // recorded ground energy
  double e_raw = 0;  // flow-limit energy
  Status status = Status::BudgetExhausted;
  double kinetic = 0;
  double l4 = 0;
  double concentration = 0;
  int iterations = 0;
};

struct GStarOptions {
  double tol_g = 1e-3;      // relative bracket width target
  double e_neg_tol = 1e-6;  // binding predicate: e < -e_neg_tol
  int max_expansions = 40;
  bool warm_start = true;
  MinimizeOptions minimize;
};

struct GStarResult {
  double g_star = 0;  // bracket midpoint
  double lo = 0, hi = 0;
  bool monotone_ok = false;  // predicate monotone over the probed g
  std::vector<ProbeRecord> trace;
};

/// Bisection for the critical coupling on the monotone binding predicate
/// e(g, m) < -e_neg_tol, with automatic bracket expansion.
GStarResult find_gstar(double m, const SampledPotential& V, double g_lo, double g_hi,
                       const GStarOptions& opts);

enum class TransitionOrder { First, Second, NoTransition, Inconclusive };

const char* to_string(TransitionOrder o);

struct ClassifyOptions {
  GStarOptions gstar;
  int descent_points = 6;     // probes g_j = g*(1 + 2^-j)
  double bracket_hint_lo = 0; // optional initial bracket
  double bracket_hint_hi = 0;
  double no_transition_probe = 1e-3;  // binding here means g* = 0
  double rho_cap = 1.0;
  std::uint64_t seed = 0;
};

struct TransitionReport {
  int dim = 0;
  double m = 0;
  std::string potential_id;
  TransitionOrder order = TransitionOrder::Inconclusive;
  double g_star = 0;
  double bracket_lo = 0, bracket_hi = 0;
  double e_zero_tol = 0;
  double rho_floor = 0;        // kinetic floor certifying a genuine state (d=3)
  double l4_first = 0, l4_last = 0;  // ||u||_4^4 endpoints of the descent
  std::vector<ProbeRecord> gstar_trace;
  std::vector<ProbeRecord> descent;  // warm-started minimizers along g_j down to g*
  ProbeRecord at_gstar;              // the verdict-carrying run at the bracket edge
};

/// Order classification: a descending warm-started minimizer sequence
/// g_j -> g*+ plus the run at the bracket edge. First order keeps its
/// diagnostics bounded and converges at g*; second order vanishes.
TransitionReport classify_transition(double m, const SampledPotential& V,
                                     const ClassifyOptions& opts);

struct ClrWitnessReport {
  std::vector<double> g_values;
  std::vector<double> integrals;  // int (V_+ * u_j^2)^{3/2}
  double floor = 0;               // half the final value
  bool non_vanishing = false;     // all entries >= floor
  bool degenerate = false;        // V_+ == 0 so the witness carries nothing
};

/// Non-vanishing witness along minimizers for a descending g sequence (d=3).
ClrWitnessReport clr_witness(double m, const SampledPotential& V,
                             const std::vector<double>& g_desc,
                             const MinimizeOptions& opts);

}  // namespace choquard
