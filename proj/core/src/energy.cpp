#include "choquard/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "choquard/constants.hpp"
#include "choquard/errors.hpp"
#include "choquard/numeric.hpp"
#include "choquard/spectral.hpp"

namespace choquard {

SpectralKernel::SpectralKernel(Field kernel) : kernel_(std::move(kernel)) {
  spectral::forward(kernel_, hat_);
  const auto& signs = spectral::center_shift_signs(kernel_.grid());
  for (std::size_t i = 0; i < hat_.size(); ++i) hat_[i] *= signs[i];
}

Field SpectralKernel::apply(const Field& f) const {
  if (!(f.grid() == kernel_.grid()))
    throw GridMismatch("SpectralKernel::apply: grid mismatch");
  std::vector<std::complex<double>> fhat;
  spectral::forward(f, fhat);
  for (std::size_t i = 0; i < fhat.size(); ++i) fhat[i] *= hat_[i];
  Field out(f.grid());
  spectral::inverse(f.grid(), fhat, out);
  const double hv = f.grid().cell_volume();
  for (double& v : out.values()) v *= hv;
  return out;
}

SampledPotential::SampledPotential(const Potential& p, const Grid& g)
    : desc_(p), grid_(g), v_(sample_potential(p, g)) {
  if (p.differentiable) {
    Field w(g);
    for (std::int64_t i = 0; i < w.size(); ++i) w[i] = p.W(point_of(g, i));
    w_ = SpectralKernel(std::move(w));
  }
  Field vp = v_.kernel();
  for (double& v : vp.values()) v = std::max(v, 0.0);
  vplus_ = SpectralKernel(std::move(vp));
}

Field SampledPotential::convolve_w(const Field& f) const {
  if (!w_.valid())
    throw NonDifferentiablePotential("convolve_w: potential " + desc_.id +
                                     " has no usable W");
  return w_.apply(f);
}

Field SampledPotential::convolve_vplus(const Field& f) const { return vplus_.apply(f); }

namespace {

Field squared(const Field& u) {
  Field s(u.grid());
  for (std::int64_t i = 0; i < u.size(); ++i) s[i] = u[i] * u[i];
  return s;
}

void require_grid(const Field& u, const SampledPotential& V, const char* op) {
  if (!(u.grid() == V.grid()))
    throw GridMismatch(std::string(op) + ": field and sampled potential grids differ");
}

}  // namespace

double interaction(const Field& u, const SampledPotential& V) {
  require_grid(u, V, "interaction");
  const Field u2 = squared(u);
  return 0.25 * inner(u2, V.convolve_v(u2));
}

EnergyBreakdown energy(const Field& u, double g, const SampledPotential& V) {
  require_grid(u, V, "energy");
  EnergyBreakdown b;
  b.kinetic = 0.5 * grad_norm_sq(u);
  b.interaction = interaction(u, V);
  b.total = b.kinetic - g * b.interaction;
  b.g = g;
  b.m = mass(u);
  return b;
}

Field el_residual(const Field& u, double g, double lambda, const SampledPotential& V) {
  require_grid(u, V, "el_residual");
  if (!V.descriptor().symmetric)
    throw AsymmetricPotential("el_residual: potential " + V.descriptor().id +
                              " is not symmetric");
  Field conv = V.convolve_v(squared(u));
  Field r = laplacian(u);
  for (std::int64_t i = 0; i < r.size(); ++i)
    r[i] = -r[i] + lambda * u[i] - g * conv[i] * u[i];
  return r;
}

double lagrange_multiplier(const Field& u, double g, const SampledPotential& V) {
  require_grid(u, V, "lagrange_multiplier");
  const double m = mass(u);
  if (m <= 0) throw ZeroMass("lagrange_multiplier: field has zero mass");
  const Field u2 = squared(u);
  const double pairing = inner(u2, V.convolve_v(u2));  // int (V*u^2) u^2
  return (g * pairing - grad_norm_sq(u)) / m;
}

LowerBoundReport lower_bound_check(const Field& u, double g, const SampledPotential& V,
                                   double R) {
  require_grid(u, V, "lower_bound_check");
  const Grid& grid = u.grid();
  if (grid.dim < 2) throw DimensionMismatch("lower_bound_check: d must be 2 or 3");
  const double m = mass(u);
  const double gsq = grad_norm_sq(u);

  const SplitNorms split = split_norms(V.descriptor(), grid, R);
  double vmax_inner = 0;
  const Field& vk = V.v_kernel();
  const double R2 = R * R;
  for (std::int64_t i = 0; i < vk.size(); ++i)
    if (radius_sq_of(grid, i) <= R2) vmax_inner = std::max(vmax_inner, std::abs(vk[i]));

  LowerBoundReport rep;
  rep.lhs = energy(u, g, V).total;
  rep.rhs = 0.25 * gsq - 0.25 * g * vmax_inner * m * m;
  const double c2 = functional_constants(grid.dim).c_interp / 4.0;
  rep.smallness = g * c2 * m * split.outer_ldhalf;
  rep.smallness_ok = rep.smallness <= 0.25;
  return rep;
}

Field dilate(const Field& u, int p, int q) {
  if (p < 1 || q < 1) throw InvalidArgument("dilate: p and q must be positive");
  const int g = std::gcd(p, q);
  p /= g;
  q /= g;
  const Grid& grid = u.grid();
  const int n = grid.n;
  const int N = n * q;
  double fine_total = 1;
  for (int d = 0; d < grid.dim; ++d) fine_total *= N;
  if (fine_total > (1 << 24))
    throw InvalidArgument("dilate: upsampled grid would exceed the memory guard");

  if (q == 1 && p == 1) return u;

  const double amp = std::pow(static_cast<double>(p) / q, grid.dim / 2.0);
  auto fine_index = [&](int i) {
    long j = N / 2 + static_cast<long>(p) * (i - n / 2);
    j %= N;
    if (j < 0) j += N;
    return static_cast<int>(j);
  };

  if (q == 1) {
    // Pure stride: t is an integer, every sample point lies on the grid.
    Field out(grid);
    for (std::int64_t i = 0; i < out.size(); ++i) {
      auto idx = unflatten(grid, i);
      std::array<int, 3> src = idx;
      for (int d = 0; d < grid.dim; ++d) src[d] = fine_index(idx[d]);
      out[i] = amp * u[flatten(grid, src)];
    }
    return out;
  }

  // Exact samples of the trigonometric interpolant on the q-times finer
  // grid: zero-pad the full spectrum with the Nyquist mode split in half.
  std::vector<std::complex<double>> coarse(static_cast<std::size_t>(grid.num_points()));
  for (std::int64_t i = 0; i < u.size(); ++i) coarse[static_cast<std::size_t>(i)] = u[i];
  spectral::forward_c2c(grid.dim, n, coarse);

  using Targets = std::vector<std::pair<int, double>>;
  auto axis_targets = [&](int m) {
    Targets t;
    if (m < n / 2)
      t.emplace_back(m, 1.0);
    else if (m > n / 2)
      t.emplace_back(m + N - n, 1.0);
    else {
      t.emplace_back(n / 2, 0.5);
      t.emplace_back(N - n / 2, 0.5);
    }
    return t;
  };

  std::vector<std::complex<double>> fine(static_cast<std::size_t>(fine_total),
                                         std::complex<double>(0, 0));
  const double scale = std::pow(static_cast<double>(q), grid.dim);
  const Targets unit{{0, 1.0}};
  for (std::int64_t src = 0; src < grid.num_points(); ++src) {
    const auto idx = unflatten(grid, src);
    std::array<const Targets*, 3> tl{&unit, &unit, &unit};
    std::array<Targets, 3> storage;
    for (int d = 0; d < grid.dim; ++d) {
      storage[d] = axis_targets(idx[d]);
      tl[d] = &storage[d];
    }
    const std::complex<double> val = coarse[static_cast<std::size_t>(src)] * scale;
    for (auto [j0, w0] : *tl[0])
      for (auto [j1, w1] : *tl[1])
        for (auto [j2, w2] : *tl[2]) {
          std::int64_t dst = 0;
          const std::array<int, 3> j{j0, j1, j2};
          for (int d = 0; d < grid.dim; ++d) dst = dst * N + j[d];
          fine[static_cast<std::size_t>(dst)] += val * (w0 * w1 * w2);
        }
  }
  spectral::inverse_c2c(grid.dim, N, fine);

  Field out(grid);
  for (std::int64_t i = 0; i < out.size(); ++i) {
    auto idx = unflatten(grid, i);
    std::int64_t j = 0;
    for (int d = 0; d < grid.dim; ++d) j = j * N + fine_index(idx[d]);
    out[i] = amp * fine[static_cast<std::size_t>(j)].real();
  }
  return out;
}

}  // namespace choquard
