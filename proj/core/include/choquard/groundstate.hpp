#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "choquard/energy.hpp"
#include "choquard/grid.hpp"

namespace choquard {

enum class Status { Converged, Vanished, BudgetExhausted };

const char* to_string(Status s);

enum class InitKind { GaussianBump, Random, ProvidedField };

struct MinimizeOptions {
  int max_iters = 50000;
  double dt0 = -1;         // <= 0 selects 0.5 h^2
  double grad_tol = 1e-6;  // EL residual target per sqrt(mass)
  double vanish_tol = 0.05;
  std::uint64_t seed = 0;
  InitKind init = InitKind::GaussianBump;
  const Field* init_field = nullptr;  // used when init == ProvidedField
  double bump_width = -1;             // <= 0 selects L/16
  int recenter_every = 250;
  double dt_max = -1;         // <= 0 selects 1000 * dt0
  bool explicit_step = false; // plain explicit Euler step instead of the
                              // semi-implicit spectral step
  double kinetic_floor = -1;  // > 0: stop once ||grad u||^2 <= floor
};

struct FlowDiagnostics {
  double peak = 0;           // max |u|
  double concentration = 0;  // sup_z ||u||_{L2(z+Q)}
  double l4 = 0;             // ||u||_4
};

struct MinimizeResult {
  Field u;
  EnergyBreakdown energy;
  double lambda = 0;
  double residual = 0;  // || -lap u + lambda u - g (V*u^2) u ||_2
  Status status = Status::BudgetExhausted;
  int iterations = 0;
  FlowDiagnostics diagnostics;
  bool constraint_hit = false;  // kinetic_floor guard fired

  /// e(g,m) <= 0 always holds on the whole space, so positive flow limits
  /// (metastable states) and vanished runs record zero here.
  double recorded_e() const;
};

/// Normalized gradient flow for inf { E_g(u) : ||u||_2^2 = m }: descend
/// -lap u - g(V*u^2)u with the Laplacian integrated exactly through the
/// spectral multiplier 1/(1 + dt |k|^2), re-estimate the multiplier each
/// step, rescale to mass m, backtrack on energy increase, recenter
/// periodically, and watch the Lions block-mass quantity for vanishing.
MinimizeResult minimize_mass(double g, double m, const SampledPotential& V,
                             const MinimizeOptions& opts);

/// Convenience overload sampling the potential first.
MinimizeResult minimize_mass(double g, double m, const Potential& p, const Grid& grid,
                             const MinimizeOptions& opts);

struct CurveEntry {
  double g = 0;
  double e = 0;      // recorded ground energy (min(total, 0); 0 when vanished)
  double e_raw = 0;  // flow-limit energy as computed
  Status status = Status::BudgetExhausted;
  int iterations = 0;
  double kinetic = 0;
  double l4 = 0;             // ||u||_4
  double concentration = 0;  // block-mass sup
};

/// e(g, m) along a strictly increasing g list, warm-starting each probe
/// from the previous converged state. Optionally returns the states.
std::vector<CurveEntry> energy_curve(const std::vector<double>& g_list, double m,
                                     const SampledPotential& V, const MinimizeOptions& opts,
                                     bool warm_start = true,
                                     std::vector<Field>* states = nullptr);

struct SubadditivityReport {
  double e_m1 = 0, e_m2 = 0, e_sum = 0;  // e(g, m1+m2)
  double tol = 0;
  bool holds = false;  // e(g, m1+m2) <= e(g,m1) + e(g,m2) + tol
};

SubadditivityReport check_subadditivity(double g, double m1, double m2,
                                        const SampledPotential& V,
                                        const MinimizeOptions& opts);

struct ScalingReport {
  double e_m = 0, e_tm = 0;
  double bound = 0;   // t^2 e(g,m) - margin
  double margin = 0;  // 1e-6 |e(g,m)|
  bool strict = false;
};

/// Strict sub-quadratic mass scaling e(g, tm) < t^2 e(g, m), t > 1.
ScalingReport check_strict_scaling(double g, double m, double t, const SampledPotential& V,
                                   const MinimizeOptions& opts);

struct TailDecayReport {
  double fitted_rate = 0;  // slope of -log|u| vs |x| over the tail shells
  double r_squared = 0;
  int shells_used = 0;
  double expected_floor = 0;  // 0.5 * sqrt(lambda)/2
  bool assertion_ok = false;
  bool assertion_skipped = false;  // fewer than 10 usable shells
};

/// Exponential tail diagnostic over the radial window [0.25 L, 0.4 L].
/// Values below 1e-14 are excluded. Throws InsufficientTail when the
/// shell profile carries no decay signal at all.
TailDecayReport tail_decay_report(const Field& u, double lambda);

}  // namespace choquard
