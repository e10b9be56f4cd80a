#pragma once

#include <cstdint>
#include <vector>

#include "choquard/energy.hpp"
#include "choquard/grid.hpp"
#include "choquard/groundstate.hpp"

namespace choquard {

/// Dilation log-parameter paired with a mass-m state; the auxiliary
/// functional acts on these.
struct AugmentedState {
  double theta = 0;
  Field u;
};

/// E_g of the mass-preserving dilation e^{3 theta/2} u(e^theta x), computed
/// on the kernel side: the dilated-kernel pairing needs no field resampling.
double augmented_energy(double theta, const Field& u, double g, const Potential& p);

/// d/dtheta of the augmented functional:
/// e^{2 theta} ||grad u||^2 + (g/4) int u^2 (W(./e^theta) * u^2).
double dtheta_augmented(double theta, const Field& u, double g, const Potential& p);

/// Small-coupling nonexistence threshold g_2 = 4 / (C_S m ||W||_{3/2})
/// below which no radial or signed critical point can exist (d = 3).
/// Returns +infinity when W vanishes identically.
double nonexistence_threshold_g2(double m, const SampledPotential& V);

/// Constructive kinetic wall radius: the largest rho_0 such that states
/// with ||grad u||^2 <= rho_0^2 have E_g >= ||grad u||^2 / 8 for every
/// g <= g_tilde, obtained from the smallest R-split admissible on the box.
double compute_rho0(double g_tilde, double m, const SampledPotential& V,
                    double rho_cap = 1.0);

struct LocalMinimizeResult {
  MinimizeResult base;
  bool constraint_hit = false;  // flow crossed the kinetic guard
  double kinetic_floor = 0;     // rho_0^2/4 plus the guard band
};

/// Local minimization over { ||grad u||^2 > rho_0^2/4 }: the constrained
/// flow with early stopping at the kinetic guard. Initialize from the
/// critical-coupling minimizer for the metastable branch.
LocalMinimizeResult local_minimize(double g, double m, const SampledPotential& V,
                                   double rho0, const MinimizeOptions& opts);

/// Discrete path on the mass sphere; gamma(0) keeps a small gradient,
/// gamma(1) is the supplied bound state.
struct Path {
  std::vector<Field> nodes;
};

struct MountainPassOptions {
  int segments = 24;        // number of path segments (nodes = segments + 1)
  int max_sweeps = 8000;
  double saddle_tol = -1;   // <= 0 selects 1e-4 sqrt(m)
  double dt0 = -1;          // <= 0 selects 0.5 h^2
  double dt_max = -1;       // <= 0 selects 100 dt0
  double ci_drift_tol = 1e-4;  // max-energy drift that arms the climbing image
  int ci_window = 50;
  std::uint64_t seed = 0;
};

struct SaddleResult {
  Field u;
  double c_mp = 0;
  double residual = 0;        // tangent EL residual of the saddle node
  double theta_residual = 0;  // |d/dtheta E~ at theta = 0|
  std::vector<double> path_history;   // max-node energy per sweep
  std::vector<double> node_energies;  // final profile along the path
  int sweeps = 0;
  bool converged = false;
  double barrier_floor = 0;  // rho_1^2 / 8
};

/// String-method saddle search between a low-gradient radial state and the
/// bound state u1, with tangent-projected descent, arc-length
/// reparametrization, radial non-negative enforcement per node, and a
/// climbing image once the max-energy profile stabilizes.
SaddleResult mountain_pass(double g, double m, const SampledPotential& V, double rho1,
                           const Field& u1, const MountainPassOptions& opts);

}  // namespace choquard
