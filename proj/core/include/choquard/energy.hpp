#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "choquard/grid.hpp"
#include "choquard/potential.hpp"

namespace choquard {

/// Kernel field with its cached half-spectrum (origin shift folded in),
/// so repeated convolutions against it cost one transform pair each.
class SpectralKernel {
 public:
  SpectralKernel() = default;
  explicit SpectralKernel(Field kernel);
  const Field& kernel() const { return kernel_; }
  Field apply(const Field& f) const;  // kernel * f, periodic
  bool valid() const { return !hat_.empty(); }

 private:
  Field kernel_;
  std::vector<std::complex<double>> hat_;
};

/// A potential sampled onto a grid: the V kernel plus (for differentiable
/// potentials) the W kernel, ready for fast convolution.
class SampledPotential {
 public:
  SampledPotential(const Potential& p, const Grid& g);

  const Potential& descriptor() const { return desc_; }
  const Grid& grid() const { return grid_; }
  const Field& v_kernel() const { return v_.kernel(); }

  Field convolve_v(const Field& f) const { return v_.apply(f); }
  Field convolve_w(const Field& f) const;      // requires differentiable W
  Field convolve_vplus(const Field& f) const;  // positive part V_+

 private:
  Potential desc_;
  Grid grid_;
  SpectralKernel v_;
  SpectralKernel w_;
  SpectralKernel vplus_;
};

struct EnergyBreakdown {
  double kinetic = 0;      // K = 1/2 ||grad u||^2
  double interaction = 0;  // V = 1/4 int u^2 (V * u^2)
  double total = 0;        // K - g * V
  double g = 0;
  double m = 0;
};

/// 1/4 <u^2, V * u^2>.
double interaction(const Field& u, const SampledPotential& V);

EnergyBreakdown energy(const Field& u, double g, const SampledPotential& V);

/// Stationarity defect field -lap u + lambda u - g (V*u^2) u.
/// Restricted to symmetric potentials (V(-x) = V(x)).
Field el_residual(const Field& u, double g, double lambda, const SampledPotential& V);

/// Least-squares multiplier (g int (V*u^2)u^2 - ||grad u||^2) / mass(u).
double lagrange_multiplier(const Field& u, double g, const SampledPotential& V);

struct LowerBoundReport {
  double lhs = 0;         // E_g(u)
  double rhs = 0;         // 1/4||grad u||^2 - (g/4)||V_{R,1}||_inf m^2
  double smallness = 0;   // g * C * m * ||V_{R,2}||_{d/2}
  bool smallness_ok = false;  // smallness <= 1/4 (split-too-coarse otherwise)
};

/// Coercivity bound with the R-split and the q = infinity inner part
/// (every catalog potential is bounded). d in {2,3}.
LowerBoundReport lower_bound_check(const Field& u, double g, const SampledPotential& V,
                                   double R);

/// Mass-preserving dilation u_t(x) = t^{d/2} u(t x) for rational t = p/q,
/// evaluated exactly on the trigonometric interpolant via zero-padded
/// resampling (upsample by q, stride by p with periodic wrap).
Field dilate(const Field& u, int p, int q);

}  // namespace choquard
