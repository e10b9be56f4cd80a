#include "choquard/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "choquard/errors.hpp"

namespace choquard::spectral {

namespace {

// Logical axis extents (n0, n1, n2): leading axes collapse to 1 below dim 3
// so the trailing axis is always the halved r2c axis.
std::array<int, 3> extents(const Grid& g) {
  switch (g.dim) {
    case 1: return {1, 1, g.n};
    case 2: return {1, g.n, g.n};
    default: return {g.n, g.n, g.n};
  }
}

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// FFTW's planner is not reentrant; plan creation is serialized and the
// plans themselves (ESTIMATE|UNALIGNED, new-array execute) are shared.
PlanPair plans_for(int dim, int n) {
  static std::mutex mtx;
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard lock(mtx);
  auto it = cache.find({dim, n});
  if (it != cache.end()) return it->second;

  Grid g{dim, n, 1.0, 1.0 / n};
  auto ext = extents(g);
  std::vector<double> real(static_cast<std::size_t>(g.num_points()));
  std::vector<fftw_complex> cplx(static_cast<std::size_t>(coeff_count(g)));
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  switch (dim) {
    case 1:
      p.fwd = fftw_plan_dft_r2c_1d(n, real.data(), cplx.data(), flags);
      p.bwd = fftw_plan_dft_c2r_1d(n, cplx.data(), real.data(), flags);
      break;
    case 2:
      p.fwd = fftw_plan_dft_r2c_2d(n, n, real.data(), cplx.data(), flags);
      p.bwd = fftw_plan_dft_c2r_2d(n, n, cplx.data(), real.data(), flags);
      break;
    default:
      p.fwd = fftw_plan_dft_r2c_3d(ext[0], ext[1], ext[2], real.data(), cplx.data(), flags);
      p.bwd = fftw_plan_dft_c2r_3d(ext[0], ext[1], ext[2], cplx.data(), real.data(), flags);
      break;
  }
  if (!p.fwd || !p.bwd) throw Error("fftw plan creation failed");
  cache[{dim, n}] = p;
  return p;
}

int signed_freq(int m, int n) { return m <= n / 2 ? m : m - n; }

struct GridKey {
  int dim;
  int n;
  double L;
  auto operator<=>(const GridKey&) const = default;
};

const std::vector<double>& cached_mode_table(const Grid& g, int which) {
  static std::mutex mtx;
  static std::map<std::pair<GridKey, int>, std::vector<double>> cache;
  GridKey key{g.dim, g.n, g.box_length};
  std::lock_guard lock(mtx);
  auto it = cache.find({key, which});
  if (it != cache.end()) return it->second;

  auto ext = extents(g);
  const int nzh = ext[2] / 2 + 1;
  const double base = 2.0 * 3.14159265358979323846 / g.box_length;
  std::vector<double> table(static_cast<std::size_t>(coeff_count(g)));
  std::int64_t idx = 0;
  for (int m0 = 0; m0 < ext[0]; ++m0) {
    const int f0 = signed_freq(m0, ext[0]);
    for (int m1 = 0; m1 < ext[1]; ++m1) {
      const int f1 = signed_freq(m1, ext[1]);
      for (int m2 = 0; m2 < nzh; ++m2, ++idx) {
        switch (which) {
          case 0: {
            const double kx = base * f0, ky = base * f1, kz = base * m2;
            table[static_cast<std::size_t>(idx)] =
                (g.dim >= 3 ? kx * kx : 0.0) + (g.dim >= 2 ? ky * ky : 0.0) + kz * kz;
            break;
          }
          case 1:
            table[static_cast<std::size_t>(idx)] =
                (m2 == 0 || m2 == ext[2] / 2) ? 1.0 : 2.0;
            break;
          default:
            table[static_cast<std::size_t>(idx)] =
                ((m0 + m1 + m2) % 2 == 0) ? 1.0 : -1.0;
            break;
        }
      }
    }
  }
  auto [pos, _] = cache.emplace(std::make_pair(key, which), std::move(table));
  return pos->second;
}

}  // namespace

std::int64_t coeff_count(const Grid& g) {
  auto ext = extents(g);
  return static_cast<std::int64_t>(ext[0]) * ext[1] * (ext[2] / 2 + 1);
}

void forward(const Field& f, std::vector<std::complex<double>>& out) {
  const Grid& g = f.grid();
  out.resize(static_cast<std::size_t>(coeff_count(g)));
  PlanPair p = plans_for(g.dim, g.n);
  // Out-of-place r2c preserves its input, so the const_cast is benign.
  fftw_execute_dft_r2c(p.fwd, const_cast<double*>(f.values().data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void inverse(const Grid& g, std::vector<std::complex<double>>& coeff, Field& out) {
  if (coeff.size() != static_cast<std::size_t>(coeff_count(g)))
    throw Error("spectral::inverse: coefficient size mismatch");
  if (!(out.grid() == g)) out = Field(g);
  PlanPair p = plans_for(g.dim, g.n);
  fftw_execute_dft_c2r(p.bwd, reinterpret_cast<fftw_complex*>(coeff.data()),
                       out.values().data());
  const double scale = 1.0 / static_cast<double>(g.num_points());
  for (double& v : out.values()) v *= scale;
}

const std::vector<double>& k_squared(const Grid& g) { return cached_mode_table(g, 0); }
const std::vector<double>& parseval_weights(const Grid& g) { return cached_mode_table(g, 1); }
const std::vector<double>& center_shift_signs(const Grid& g) { return cached_mode_table(g, 2); }

namespace {

fftw_plan c2c_plan(int dim, int n, int sign) {
  static std::mutex mtx;
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard lock(mtx);
  auto key = std::make_tuple(dim, n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<fftw_complex> buf(static_cast<std::size_t>(std::pow(n, dim)) + 1);
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan p = nullptr;
  switch (dim) {
    case 1: p = fftw_plan_dft_1d(n, buf.data(), buf.data(), sign, flags); break;
    case 2: p = fftw_plan_dft_2d(n, n, buf.data(), buf.data(), sign, flags); break;
    default: p = fftw_plan_dft_3d(n, n, n, buf.data(), buf.data(), sign, flags); break;
  }
  if (!p) throw Error("fftw c2c plan creation failed");
  cache[key] = p;
  return p;
}

}  // namespace

void forward_c2c(int dim, int n, std::vector<std::complex<double>>& inout) {
  fftw_plan p = c2c_plan(dim, n, FFTW_FORWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(inout.data()),
                   reinterpret_cast<fftw_complex*>(inout.data()));
}

void inverse_c2c(int dim, int n, std::vector<std::complex<double>>& inout) {
  fftw_plan p = c2c_plan(dim, n, FFTW_BACKWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(inout.data()),
                   reinterpret_cast<fftw_complex*>(inout.data()));
  double N = 1;
  for (int d = 0; d < dim; ++d) N *= n;
  const double scale = 1.0 / N;
  for (auto& z : inout) z *= scale;
}

}  // namespace choquard::spectral
