#include "choquard/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "choquard/errors.hpp"
#include "choquard/numeric.hpp"
#include "choquard/spectral.hpp"

namespace choquard {

SchrodingerOperator::SchrodingerOperator(const Field& u, double g,
                                         const SampledPotential& V)
    : grid_(u.grid()) {
  if (!(u.grid() == V.grid()))
    throw GridMismatch("SchrodingerOperator: field and potential grids differ");
  Field u2(grid_);
  for (std::int64_t i = 0; i < u.size(); ++i) u2[i] = u[i] * u[i];
  w_ = V.convolve_v(u2);
  for (double& v : w_.values()) v *= 0.5 * g;
}

Field SchrodingerOperator::apply(const Field& psi) const {
  if (!(psi.grid() == grid_)) throw GridMismatch("SchrodingerOperator::apply");
  std::vector<std::complex<double>> phat;
  spectral::forward(psi, phat);
  const auto& k2 = spectral::k_squared(grid_);
  for (std::size_t i = 0; i < phat.size(); ++i) phat[i] *= 0.5 * k2[i];
  Field out(grid_);
  spectral::inverse(grid_, phat, out);
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] -= w_[i] * psi[i];
  return out;
}

double SchrodingerOperator::form(const Field& psi) const {
  Field psi2(grid_);
  for (std::int64_t i = 0; i < psi.size(); ++i) psi2[i] = psi[i] * psi[i];
  return 0.5 * grad_norm_sq(psi) - inner(w_, psi2);
}

namespace {

// Eigen-decomposition of a symmetric tridiagonal matrix by the implicit
// QL algorithm (classic tql2/tqli). d = diagonal, e[i] couples rows i-1,i
// for i >= 1. z starts as identity and returns eigenvectors in columns.
void tql2(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z, int n) {
  auto zat = [&](int i, int j) -> double& { return z[static_cast<std::size_t>(i * n + j)]; };
  auto dd = [&](int i) -> double& { return d[static_cast<std::size_t>(i)]; };
  auto ee = [&](int i) -> double& { return e[static_cast<std::size_t>(i)]; };
  for (int i = 1; i < n; ++i) ee(i - 1) = ee(i);
  ee(n - 1) = 0.0;

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double scale = std::abs(dd(m)) + std::abs(dd(m + 1));
        if (std::abs(ee(m)) <= 1e-300 + 2.3e-16 * scale) break;
      }
      if (m != l) {
        if (++iter == 50) throw NoConvergence("tql2: tridiagonal QL failed");
        double g = (dd(l + 1) - dd(l)) / (2.0 * ee(l));
        double r = std::hypot(g, 1.0);
        g = dd(m) - dd(l) + ee(l) / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (int i = m - 1; i >= l; --i) {
          double f = s * ee(i);
          const double b = c * ee(i);
          r = std::hypot(f, g);
          ee(i + 1) = r;
          if (r == 0.0) {
            dd(i + 1) -= p;
            ee(m) = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = dd(i + 1) - p;
          r = (dd(i) - g) * s + 2.0 * c * b;
          p = s * r;
          dd(i + 1) = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = zat(k, i + 1);
            zat(k, i + 1) = s * zat(k, i) + c * f;
            zat(k, i) = c * zat(k, i) - s * f;
          }
        }
        if (underflow) continue;
        dd(l) -= p;
        ee(l) = g;
        ee(m) = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

EigenResult lowest_eigenpair(const Field& u, double g, const SampledPotential& V,
                             double eig_tol) {
  SchrodingerOperator H(u, g, V);
  const Grid& grid = H.grid();

  // Positive start vector: the lowest mode of a Schrodinger operator is
  // nodeless, so a positive start never loses the target subspace.
  Field v0(grid, 1.0);
  for (std::int64_t i = 0; i < v0.size(); ++i) v0[i] += std::abs(u[i]);
  {
    const double nrm = std::sqrt(mass(v0));
    for (double& x : v0.values()) x /= nrm;
  }

  const int kdim = 60;
  const int max_restarts = 200;
  EigenResult result;
  for (int restart = 0; restart < max_restarts; ++restart) {
    std::vector<Field> basis;
    basis.reserve(kdim);
    basis.push_back(v0);
    std::vector<double> alpha, beta;

    for (int j = 0; j < kdim; ++j) {
      Field w = H.apply(basis.back());
      if (j > 0) {
        const double b = beta.back();
        const Field& prev = basis[basis.size() - 2];
        for (std::int64_t i = 0; i < w.size(); ++i) w[i] -= b * prev[i];
      }
      const double a = inner(w, basis.back());
      alpha.push_back(a);
      for (std::int64_t i = 0; i < w.size(); ++i) w[i] -= a * basis.back()[i];
      // full reorthogonalization, two passes
      for (int pass = 0; pass < 2; ++pass)
        for (const Field& q : basis) {
          const double c = inner(w, q);
          for (std::int64_t i = 0; i < w.size(); ++i) w[i] -= c * q[i];
        }
      const double b = std::sqrt(std::max(0.0, mass(w)));
      if (b < 1e-13 || j == kdim - 1) break;
      beta.push_back(b);
      for (double& x : w.values()) x /= b;
      basis.push_back(std::move(w));
    }

    const int m = static_cast<int>(alpha.size());
    std::vector<double> d = alpha;
    std::vector<double> e(static_cast<std::size_t>(m), 0.0);
    for (int i = 1; i < m; ++i) e[static_cast<std::size_t>(i)] = beta[static_cast<std::size_t>(i - 1)];
    std::vector<double> z(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) z[static_cast<std::size_t>(i * m + i)] = 1.0;
    if (m > 1) tql2(d, e, z, m);

    int lo = 0;
    for (int i = 1; i < m; ++i)
      if (d[static_cast<std::size_t>(i)] < d[static_cast<std::size_t>(lo)]) lo = i;

    Field psi(grid);
    for (int i = 0; i < static_cast<int>(basis.size()) && i < m; ++i) {
      const double c = z[static_cast<std::size_t>(i * m + lo)];
      for (std::int64_t k = 0; k < psi.size(); ++k) psi[k] += c * basis[static_cast<std::size_t>(i)][k];
    }
    const double nrm = std::sqrt(mass(psi));
    for (double& x : psi.values()) x /= nrm;

    Field Hpsi = H.apply(psi);
    const double ev = inner(Hpsi, psi);
    Field r = Hpsi;
    for (std::int64_t k = 0; k < r.size(); ++k) r[k] -= ev * psi[k];
    const double res = std::sqrt(mass(r));

    result.eigenvalue = ev;
    result.eigenfunction = psi;
    result.rayleigh_residual = res;
    result.restarts = restart;
    if (res <= eig_tol) return result;
    v0 = std::move(psi);
  }
  throw NoConvergence("lowest_eigenpair: residual " +
                      std::to_string(result.rayleigh_residual) +
                      " above tolerance after restarts");
}

EjBoundReport check_ej_bound(const Field& u_minimizer, double g, double m,
                             const SampledPotential& V) {
  EjBoundReport rep;
  rep.e_gm = energy(u_minimizer, g, V).total;
  rep.bound = rep.e_gm / m + 1e-8;
  rep.eigenvalue = lowest_eigenpair(u_minimizer, g, V).eigenvalue;
  rep.holds = rep.eigenvalue <= rep.bound;
  return rep;
}

double clr_integral(const Field& u, const SampledPotential& V) {
  if (u.grid().dim != 3)
    throw DimensionMismatch("clr_integral: defined for d = 3 only");
  Field u2(u.grid());
  for (std::int64_t i = 0; i < u.size(); ++i) u2[i] = u[i] * u[i];
  Field conv = V.convolve_vplus(u2);
  std::vector<double> terms(static_cast<std::size_t>(conv.size()));
  for (std::int64_t i = 0; i < conv.size(); ++i)
    terms[static_cast<std::size_t>(i)] = std::pow(std::max(0.0, conv[i]), 1.5);
  return u.grid().cell_volume() * pairwise_sum(terms);
}

}  // namespace choquard
