#include "choquard/pokhozaev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "choquard/errors.hpp"

namespace choquard {

PokhozaevReport pokhozaev_residual(const Field& u, double lambda, double g,
                                   const SampledPotential& V) {
  const Potential& p = V.descriptor();
  if (!p.differentiable)
    throw NonDifferentiablePotential("pokhozaev_residual: " + p.id + " has no usable W");
  if (!p.symmetric)
    throw AsymmetricPotential("pokhozaev_residual: " + p.id + " is not symmetric");
  const int d = u.grid().dim;

  Field u2(u.grid());
  for (std::int64_t i = 0; i < u.size(); ++i) u2[i] = u[i] * u[i];

  PokhozaevReport rep;
  rep.term_gradient = 0.5 * (d - 2) * grad_norm_sq(u);
  rep.term_mass = 0.5 * d * lambda * mass(u);
  rep.term_w = 0.25 * g * inner(u2, V.convolve_w(u2));
  rep.term_v = 0.5 * d * g * inner(u2, V.convolve_v(u2));
  rep.lhs = rep.term_gradient + rep.term_mass;
  rep.rhs = rep.term_w + rep.term_v;
  const double scale = std::max({std::abs(rep.term_gradient), std::abs(rep.term_mass),
                                 std::abs(rep.term_w), std::abs(rep.term_v)});
  rep.relative_residual = std::abs(rep.lhs - rep.rhs) / (1.0 + scale);
  return rep;
}

double two_d_F_pairing(const Field& u, const SampledPotential& V) {
  if (u.grid().dim != 2)
    throw DimensionMismatch("two_d_F_pairing: defined for d = 2 only");
  const Potential& p = V.descriptor();
  if (!p.differentiable)
    throw NonDifferentiablePotential("two_d_F_pairing: " + p.id + " has no usable W");
  if (!p.radial) throw InvalidArgument("two_d_F_pairing: potential must be radial");
  find_rstar(p);  // throws NoSignChange when the kernel sign condition fails

  // F kernel is assembled from the two cached kernels: F = V/2 + W/4.
  Field u2(u.grid());
  for (std::int64_t i = 0; i < u.size(); ++i) u2[i] = u[i] * u[i];
  Field conv_v = V.convolve_v(u2);
  Field conv_w = V.convolve_w(u2);
  Field conv_f(u.grid());
  for (std::int64_t i = 0; i < conv_f.size(); ++i)
    conv_f[i] = 0.5 * conv_v[i] + 0.25 * conv_w[i];
  return inner(u2, conv_f);
}

AutocorrelationReport autocorrelation_monotone_check(const Field& u) {
  const Grid& g = u.grid();
  Field u2(g);
  for (std::int64_t i = 0; i < u.size(); ++i) u2[i] = u[i] * u[i];
  Field h = convolve(u2, u2);

  const double r_max = 0.5 * g.box_length * 0.999;
  const int nbins = static_cast<int>(r_max / g.spacing);
  std::vector<double> sum(static_cast<std::size_t>(nbins), 0.0);
  std::vector<int> cnt(static_cast<std::size_t>(nbins), 0);
  double hmax = 0;
  for (std::int64_t i = 0; i < h.size(); ++i) {
    hmax = std::max(hmax, h[i]);
    const double r = std::sqrt(radius_sq_of(g, i));
    if (r >= r_max) continue;
    const int b = std::min(nbins - 1, static_cast<int>(r / g.spacing));
    sum[static_cast<std::size_t>(b)] += h[i];
    cnt[static_cast<std::size_t>(b)] += 1;
  }

  AutocorrelationReport rep;
  rep.slack = 1e-8 * hmax;
  double prev = std::numeric_limits<double>::infinity();
  for (int b = 0; b < nbins; ++b) {
    if (cnt[static_cast<std::size_t>(b)] == 0) continue;
    const double mean = sum[static_cast<std::size_t>(b)] / cnt[static_cast<std::size_t>(b)];
    if (mean > prev) rep.worst_violation = std::max(rep.worst_violation, mean - prev);
    prev = mean;
    ++rep.shells;
  }
  rep.monotone = rep.worst_violation <= rep.slack;
  return rep;
}

}  // namespace choquard
