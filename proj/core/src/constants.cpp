#include "choquard/constants.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "choquard/grid.hpp"
#include "choquard/rng.hpp"

namespace choquard {

namespace {

Grid reference_grid(int dim) {
  switch (dim) {
    case 1: return make_grid(1, 1024, 80.0);
    case 2: return make_grid(2, 128, 40.0);
    default: return make_grid(3, 64, 30.0);
  }
}

Field profile(const Grid& g, int family, double sigma) {
  Field f(g);
  for (std::int64_t i = 0; i < f.size(); ++i) {
    const double r = std::sqrt(radius_sq_of(g, i)) / sigma;
    switch (family) {
      case 0: f[i] = std::exp(-0.5 * r * r); break;
      case 1: f[i] = 1.0 / std::cosh(r); break;
      case 2: f[i] = 1.0 / (1.0 + r * r); break;
      default: f[i] = 1.0 / std::sqrt(1.0 + r * r); break;
    }
  }
  return f;
}

/// sup ||u||_p^s / (||grad u||^a ||u||_2^b) over the trial set.
double max_quotient(const Grid& g, double p, double s, double a, double b) {
  double best = 0;
  auto eval = [&](const Field& u) {
    const double num = std::pow(lp_norm(u, p), s);
    const double den =
        std::pow(std::sqrt(grad_norm_sq(u)), a) * std::pow(std::sqrt(mass(u)), b);
    if (den > 0) best = std::max(best, num / den);
  };
  for (int family = 0; family < 4; ++family) {
    // The Sobolev-optimizer shape has no L2 norm on the whole space; keep
    // it away from quotients with b > 0 where box truncation would fake
    // an unbounded quotient.
    if (family >= 2 && b > 0 && g.dim == 3) continue;
    for (double sigma = 0.3; sigma < g.box_length / 8; sigma *= 1.3)
      eval(profile(g, family, sigma));
  }
  for (std::uint64_t k = 0; k < 8; ++k)
    eval(random_smooth_field(g, mix_seed(20240601, k), 1.0));
  return best;
}

}  // namespace

const FunctionalConstants& functional_constants(int dim) {
  static std::mutex mtx;
  static std::map<int, FunctionalConstants> cache;
  std::lock_guard lock(mtx);
  auto it = cache.find(dim);
  if (it != cache.end()) return it->second;

  const Grid g = reference_grid(dim);
  FunctionalConstants c;
  const double margin = 1.1;
  switch (dim) {
    case 1:
      c.c_quartic = margin * max_quotient(g, 4, 4, 1, 3);
      break;
    case 2:
      c.c_quartic = margin * max_quotient(g, 4, 4, 2, 2);
      c.c_interp = margin * max_quotient(g, 4, 4, 2, 2);
      break;
    default:
      c.c_quartic = margin * max_quotient(g, 4, 4, 3, 1);
      c.c_interp = margin * max_quotient(g, 3, 4, 2, 2);
      c.c_sobolev = margin * max_quotient(g, 6, 2, 2, 0);
      break;
  }
  return cache.emplace(dim, c).first->second;
}

}  // namespace choquard
