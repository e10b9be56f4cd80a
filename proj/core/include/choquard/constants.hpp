#pragma once

namespace choquard {

/// Numerically estimated constants of the functional inequalities used by
/// the lower bounds and thresholds. Estimated once per dimension on a
/// reference grid by maximizing the scale-invariant Rayleigh quotients over
/// profile families (Gaussian, sech, Lorentzian, Sobolev-optimizer shape)
/// plus seeded random trials, then inflated by a 10% safety margin. All
/// downstream uses are one-sided, so overestimates stay conservative.
struct FunctionalConstants {
  /// ||u||_4^4 <= c_quartic * ||grad u||^a * ||u||_2^b with
  /// (a,b) = (1,3) in d=1, (2,2) in d=2, (3,1) in d=3.
  double c_quartic = 0;

  /// ||u||_{2d/(d-1)}^4 <= c_interp * ||grad u||^2 ||u||_2^2 (d = 2,3);
  /// the coupling-smallness constant of the coercivity bound.
  double c_interp = 0;

  /// ||u||_6^2 <= c_sobolev * ||grad u||^2 (d = 3 only).
  double c_sobolev = 0;
};

/// Cached per dimension; deterministic.
const FunctionalConstants& functional_constants(int dim);

}  // namespace choquard
