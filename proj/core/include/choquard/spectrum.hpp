#pragma once

#include "choquard/energy.hpp"
#include "choquard/grid.hpp"

namespace choquard {

/// Matrix-free H = -1/2 lap - (g/2)(V * u^2), the linearized operator whose
/// lowest eigenvalue witnesses binding near the critical coupling.
class SchrodingerOperator {
 public:
  SchrodingerOperator(const Field& u, double g, const SampledPotential& V);

  Field apply(const Field& psi) const;

  /// Quadratic form S(psi) = 1/2 ||grad psi||^2 - int w psi^2.
  double form(const Field& psi) const;

  const Field& potential_term() const { return w_; }
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  Field w_;  // (g/2) (V * u^2)
};

struct EigenResult {
  double eigenvalue = 0;
  Field eigenfunction;         // unit L2 mass
  double rayleigh_residual = 0;  // ||H psi - e psi||_2
  int restarts = 0;
};

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization
/// (Krylov dimension <= 60). Residual-verified to eig_tol.
EigenResult lowest_eigenpair(const Field& u, double g, const SampledPotential& V,
                             double eig_tol = 1e-8);

struct EjBoundReport {
  double eigenvalue = 0;
  double e_gm = 0;     // E_g(u), the minimizer energy
  double bound = 0;    // e_gm / m + 1e-8
  bool holds = false;  // eigenvalue <= bound
};

/// Spectral bound e_0 <= e(g,m)/m satisfied below the minimizer energy.
EjBoundReport check_ej_bound(const Field& u_minimizer, double g, double m,
                             const SampledPotential& V);

/// int (V_+ * u^2)^{3/2}, the non-vanishing witness integral (d = 3).
double clr_integral(const Field& u, const SampledPotential& V);

}  // namespace choquard
