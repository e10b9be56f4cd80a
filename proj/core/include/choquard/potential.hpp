#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <string>

#include "choquard/grid.hpp"

namespace choquard {

/// Interaction potential V with its analytic radial-derivative weight
/// W(x) = x . grad V(x). W is supplied in closed form per catalog entry;
/// finite differences are used only as cross-checks, never inside the
/// identities.
struct Potential {
  std::string id;
  int dim = 0;
  bool symmetric = false;      // V(-x) = V(x)
  bool radial = false;         // V depends on |x| only
  bool nonincreasing = false;  // radial profile non-increasing on [0, inf)
  bool differentiable = false; // W defined everywhere (step fixtures are not)
  bool test_only = false;      // fixtures violating the standing assumptions

  std::function<double(const std::array<double, 3>&)> V;
  std::function<double(const std::array<double, 3>&)> W;

  /// Characteristic length (sets the default root-search range).
  double width = 1.0;

  /// Optional override for sampling onto a grid (the delta cell needs
  /// spacing-dependent values); empty for pointwise-sampled potentials.
  std::function<Field(const Grid&)> sample_override;

  double eval_radial_V(double r) const { return V({r, 0, 0}); }
  double eval_radial_W(double r) const { return W({r, 0, 0}); }
};

/// Samples the potential onto the grid as a convolution kernel field.
Field sample_potential(const Potential& p, const Grid& g);

/// Regularized ion-atom potential V(x) = 1/(|x|^2 + b^2)^2 with
/// W(x) = -4|x|^2/(|x|^2 + b^2)^3.
Potential ion_atom(double b, int dim);

/// Gaussian fixture V(x) = a exp(-|x|^2/(2 s^2)), W = -(|x|^2/s^2) V.
Potential gaussian_potential(double a, double s, int dim);

/// 1D step potential: 1 on |x| <= eps, -2 on eps < |x| < 1, 0 beyond.
/// Not differentiable; Pokhozaev-style operations reject it.
Potential step_1d(double eps);

/// Unit-strength delta on the origin cell (1/h^dim there, 0 elsewhere):
/// convolving with it is the identity. Test-only fixture.
Potential delta_cell(int dim);

/// Radial table (r, V, W) with linear interpolation, loaded from a
/// whitespace-separated text file with '#' comments. Zero beyond the
/// last tabulated radius.
Potential table_potential(const std::filesystem::path& file, int dim);

/// F(x) = V(x)/2 + W(x)/4, the sign-changing kernel of the 2D exclusion
/// argument. Requires a differentiable potential.
double eval_F(const Potential& p, const std::array<double, 3>& x);

struct RStarResult {
  double r = 0;
  /// Sampling detected exactly one sign change of V + W/2 on (0, r_max].
  bool unique_sign_change = false;
};

/// Radial root of V(r) + W(r)/2 = 0, located by bisection to 1e-10 after
/// a sampling scan. r_max defaults to 10x the potential width when <= 0.
RStarResult find_rstar(const Potential& p, double r_max = 0);

struct SplitNorms {
  double inner_l1 = 0;    // || chi_{B_R} V ||_1
  double outer_ldhalf = 0; // || (1 - chi_{B_R}) V ||_{d/2}  (L^1 when d = 1)
};

/// Quadrature of the R-split norms on the grid.
SplitNorms split_norms(const Potential& p, const Grid& g, double R);

/// |W - central finite difference of x.grad V| aggregated over `samples`
/// random points; used by the catalog self-checks.
double w_consistency_error(const Potential& p, int samples, std::uint64_t seed);

}  // namespace choquard
