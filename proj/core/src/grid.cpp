#include "choquard/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

#include "choquard/errors.hpp"
#include "choquard/numeric.hpp"
#include "choquard/spectral.hpp"

namespace choquard {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same_grid(const Field& a, const Field& b, const char* op) {
  if (!(a.grid() == b.grid()))
    throw GridMismatch(std::string(op) + ": fields live on different grids");
}

}  // namespace

double pairwise_sum(std::span<const double> v) {
  // Blocks of 128 are summed directly, then halves recurse.
  if (v.size() <= 128) {
    double s = 0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double pairwise_dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() <= 128) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  const std::size_t half = a.size() / 2;
  return pairwise_dot(a.first(half), b.first(half)) +
         pairwise_dot(a.subspan(half), b.subspan(half));
}

Grid make_grid(int dim, int n, double box_length) {
  if (dim < 1 || dim > 3)
    throw InvalidArgument("make_grid: dim must be 1, 2 or 3 (invalid-dimension)");
  if (n < 8 || !is_power_of_two(n))
    throw InvalidArgument("make_grid: n must be a power of two >= 8 (non-power-of-two)");
  if (!(box_length > 0))
    throw InvalidArgument("make_grid: box length must be positive (nonpositive-L)");
  Grid g;
  g.dim = dim;
  g.n = n;
  g.box_length = box_length;
  g.spacing = box_length / n;
  return g;
}

bool Field::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::array<int, 3> unflatten(const Grid& g, std::int64_t flat) {
  std::array<int, 3> idx{0, 0, 0};
  for (int d = g.dim - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(flat % g.n);
    flat /= g.n;
  }
  return idx;
}

std::int64_t flatten(const Grid& g, const std::array<int, 3>& idx) {
  std::int64_t flat = 0;
  for (int d = 0; d < g.dim; ++d) flat = flat * g.n + idx[d];
  return flat;
}

std::array<double, 3> point_of(const Grid& g, std::int64_t flat) {
  auto idx = unflatten(g, flat);
  std::array<double, 3> x{0, 0, 0};
  for (int d = 0; d < g.dim; ++d) x[d] = g.coord(idx[d]);
  return x;
}

double radius_sq_of(const Grid& g, std::int64_t flat) {
  auto x = point_of(g, flat);
  return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
}

double mass(const Field& u) {
  return u.grid().cell_volume() * pairwise_dot(u.values(), u.values());
}

double inner(const Field& a, const Field& b) {
  require_same_grid(a, b, "inner");
  return a.grid().cell_volume() * pairwise_dot(a.values(), b.values());
}

double lp_norm(const Field& u, double p) {
  std::vector<double> pow_vals(u.values().size());
  for (std::size_t i = 0; i < pow_vals.size(); ++i)
    pow_vals[i] = std::pow(std::abs(u.values()[i]), p);
  const double s = u.grid().cell_volume() * pairwise_sum(pow_vals);
  return std::pow(s, 1.0 / p);
}

double max_abs(const Field& u) {
  double m = 0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

Field convolve(const Field& kernel, const Field& f) {
  require_same_grid(kernel, f, "convolve");
  const Grid& g = f.grid();
  std::vector<std::complex<double>> khat, fhat;
  spectral::forward(kernel, khat);
  spectral::forward(f, fhat);
  const auto& signs = spectral::center_shift_signs(g);
  for (std::size_t i = 0; i < fhat.size(); ++i) fhat[i] *= khat[i] * signs[i];
  Field out(g);
  spectral::inverse(g, fhat, out);
  const double hv = g.cell_volume();
  for (double& v : out.values()) v *= hv;
  return out;
}

Field laplacian(const Field& f) {
  const Grid& g = f.grid();
  std::vector<std::complex<double>> fhat;
  spectral::forward(f, fhat);
  const auto& k2 = spectral::k_squared(g);
  for (std::size_t i = 0; i < fhat.size(); ++i) fhat[i] *= -k2[i];
  Field out(g);
  spectral::inverse(g, fhat, out);
  return out;
}

double grad_norm_sq(const Field& f) {
  const Grid& g = f.grid();
  std::vector<std::complex<double>> fhat;
  spectral::forward(f, fhat);
  const auto& k2 = spectral::k_squared(g);
  const auto& w = spectral::parseval_weights(g);
  std::vector<double> terms(fhat.size());
  for (std::size_t i = 0; i < fhat.size(); ++i) terms[i] = w[i] * k2[i] * std::norm(fhat[i]);
  // Parseval: h^d/N * sum_k w |k|^2 |f_hat|^2.
  return g.cell_volume() / static_cast<double>(g.num_points()) * pairwise_sum(terms);
}

Field rearrange_decreasing(const Field& f) {
  const Grid& g = f.grid();
  const std::int64_t N = g.num_points();

  // Point order by (distance from origin, lexicographic index): cached per
  // grid shape since the mountain-pass search rearranges every node each sweep.
  static std::mutex mtx;
  static std::map<std::tuple<int, int>, std::vector<std::int64_t>> order_cache;
  const std::vector<std::int64_t>* order_ptr;
  {
    std::lock_guard lock(mtx);
    auto key = std::make_tuple(g.dim, g.n);
    auto it = order_cache.find(key);
    if (it == order_cache.end()) {
      std::vector<std::int64_t> order(static_cast<std::size_t>(N));
      std::iota(order.begin(), order.end(), 0);
      // radius_sq uses unit spacing; ordering is spacing-independent.
      Grid unit = g;
      unit.spacing = 1.0;
      std::stable_sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        return radius_sq_of(unit, a) < radius_sq_of(unit, b);
      });
      it = order_cache.emplace(key, std::move(order)).first;
    }
    order_ptr = &it->second;
  }

  std::vector<double> vals(f.values().begin(), f.values().end());
  for (double& v : vals) v = std::abs(v);
  std::sort(vals.begin(), vals.end(), std::greater<double>());

  Field out(g);
  const auto& order = *order_ptr;
  for (std::size_t r = 0; r < vals.size(); ++r)
    out[order[r]] = vals[r];
  return out;
}

namespace {

// Kernel for the block-mass map: indicator of the cube of side 1 centered
// at the origin (clipped to the box when L < 1), scaled so that
// convolve(K, f^2)(z) = integral of f^2 over z + Q.
Field unit_cube_kernel(const Grid& g) {
  Field k(g);
  const double half = std::min(0.5, g.box_length / 2 - g.spacing / 2);
  for (std::int64_t i = 0; i < k.size(); ++i) {
    auto x = point_of(g, i);
    bool in = true;
    for (int d = 0; d < g.dim; ++d) in = in && std::abs(x[d]) <= half + 1e-12;
    k[i] = in ? 1.0 : 0.0;
  }
  return k;
}

std::int64_t block_mass_argmax(const Field& f, double* out_value) {
  Field sq(f.grid());
  for (std::int64_t i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  Field bm = convolve(unit_cube_kernel(f.grid()), sq);
  // Exact ties prefer the point nearest the origin (then lowest index),
  // which makes recentering idempotent: once centered, the origin wins.
  std::int64_t best = 0;
  double best_v = bm[0];
  double best_r = radius_sq_of(f.grid(), 0);
  for (std::int64_t i = 1; i < bm.size(); ++i) {
    if (bm[i] > best_v) {
      best_v = bm[i];
      best = i;
      best_r = radius_sq_of(f.grid(), i);
    } else if (bm[i] == best_v) {
      const double r = radius_sq_of(f.grid(), i);
      if (r < best_r) {
        best = i;
        best_r = r;
      }
    }
  }
  if (out_value) *out_value = std::sqrt(std::max(0.0, best_v));
  return best;
}

}  // namespace

double block_mass_sup(const Field& f) {
  double v = 0;
  block_mass_argmax(f, &v);
  return v;
}

Field cyclic_shift(const Field& f, const std::array<int, 3>& cells) {
  const Grid& g = f.grid();
  Field out(g);
  const int n = g.n;
  auto wrap = [n](int i) {
    i %= n;
    return i < 0 ? i + n : i;
  };
  for (std::int64_t i = 0; i < f.size(); ++i) {
    auto idx = unflatten(g, i);
    std::array<int, 3> src = idx;
    for (int d = 0; d < g.dim; ++d) src[d] = wrap(idx[d] - cells[d]);
    out[i] = f[flatten(g, src)];
  }
  return out;
}

Field recenter(const Field& f) {
  double sup = 0;
  const std::int64_t arg = block_mass_argmax(f, &sup);
  if (sup == 0) throw ZeroField("recenter: field is identically zero");
  const Grid& g = f.grid();
  auto idx = unflatten(g, arg);
  std::array<int, 3> shift{0, 0, 0};
  for (int d = 0; d < g.dim; ++d) shift[d] = g.n / 2 - idx[d];
  if (shift == std::array<int, 3>{0, 0, 0}) return f;
  return cyclic_shift(f, shift);
}

}  // namespace choquard
