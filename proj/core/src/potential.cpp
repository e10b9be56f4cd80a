#include "choquard/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "choquard/errors.hpp"
#include "choquard/numeric.hpp"

namespace choquard {

namespace {
double norm_sq(const std::array<double, 3>& x) {
  return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
}
}  // namespace

Field sample_potential(const Potential& p, const Grid& g) {
  if (p.dim != g.dim)
    throw DimensionMismatch("sample_potential: potential dim " + std::to_string(p.dim) +
                            " != grid dim " + std::to_string(g.dim));
  if (p.sample_override) return p.sample_override(g);
  Field f(g);
  for (std::int64_t i = 0; i < f.size(); ++i) f[i] = p.V(point_of(g, i));
  return f;
}

Potential ion_atom(double b, int dim) {
  if (!(b > 0)) throw InvalidArgument("ion_atom: b must be positive (nonpositive-b)");
  Potential p;
  p.id = "ion_atom(b=" + std::to_string(b) + ")";
  p.dim = dim;
  p.symmetric = p.radial = p.nonincreasing = p.differentiable = true;
  p.width = b;
  const double b2 = b * b;
  p.V = [b2](const std::array<double, 3>& x) {
    const double d = norm_sq(x) + b2;
    return 1.0 / (d * d);
  };
  p.W = [b2](const std::array<double, 3>& x) {
    const double r2 = norm_sq(x);
    const double d = r2 + b2;
    return -4.0 * r2 / (d * d * d);
  };
  return p;
}

Potential gaussian_potential(double a, double s, int dim) {
  if (!(s > 0)) throw InvalidArgument("gaussian_potential: s must be positive (nonpositive-s)");
  Potential p;
  p.id = "gaussian(a=" + std::to_string(a) + ",s=" + std::to_string(s) + ")";
  p.dim = dim;
  p.symmetric = p.radial = p.differentiable = true;
  p.nonincreasing = a > 0;
  p.width = s;
  const double inv2s2 = 1.0 / (2 * s * s);
  const double invs2 = 1.0 / (s * s);
  p.V = [a, inv2s2](const std::array<double, 3>& x) {
    return a * std::exp(-norm_sq(x) * inv2s2);
  };
  p.W = [a, inv2s2, invs2](const std::array<double, 3>& x) {
    const double r2 = norm_sq(x);
    return -(r2 * invs2) * a * std::exp(-r2 * inv2s2);
  };
  return p;
}

Potential step_1d(double eps) {
  if (!(eps > 0 && eps < 0.25))
    throw InvalidArgument("step_1d: eps must lie in (0, 1/4) (eps-out-of-range)");
  Potential p;
  p.id = "step_1d(eps=" + std::to_string(eps) + ")";
  p.dim = 1;
  p.symmetric = p.radial = true;
  p.nonincreasing = false;
  p.differentiable = false;  // jumps at |x| = eps and |x| = 1
  p.width = 1.0;
  p.V = [eps](const std::array<double, 3>& x) {
    const double r = std::abs(x[0]);
    if (r <= eps) return 1.0;
    if (r < 1.0) return -2.0;
    return 0.0;
  };
  p.W = [](const std::array<double, 3>&) { return 0.0; };
  return p;
}

Potential delta_cell(int dim) {
  Potential p;
  p.id = "delta_cell";
  p.dim = dim;
  p.symmetric = p.radial = true;
  p.nonincreasing = true;
  p.differentiable = false;
  p.test_only = true;
  p.width = 1.0;
  p.V = [](const std::array<double, 3>& x) { return norm_sq(x) == 0 ? 1.0 : 0.0; };
  p.W = [](const std::array<double, 3>&) { return 0.0; };
  p.sample_override = [](const Grid& g) {
    Field f(g);
    std::array<int, 3> origin{0, 0, 0};
    for (int d = 0; d < g.dim; ++d) origin[d] = g.n / 2;
    f[flatten(g, origin)] = 1.0 / g.cell_volume();
    return f;
  };
  return p;
}

Potential table_potential(const std::filesystem::path& file, int dim) {
  std::ifstream is(file);
  if (!is) throw InvalidArgument("table_potential: cannot open " + file.string());
  std::vector<double> rs, vs, ws;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double r, v, w;
    if (ls >> r >> v >> w) {
      if (!rs.empty() && r <= rs.back())
        throw InvalidArgument("table_potential: radii must be strictly increasing");
      rs.push_back(r);
      vs.push_back(v);
      ws.push_back(w);
    }
  }
  if (rs.size() < 2) throw InvalidArgument("table_potential: need at least two rows");

  auto interp = [](const std::vector<double>& rr, const std::vector<double>& yy, double r) {
    if (r <= rr.front()) return yy.front();
    if (r >= rr.back()) return 0.0;  // zero beyond the table
    const auto it = std::upper_bound(rr.begin(), rr.end(), r);
    const std::size_t j = static_cast<std::size_t>(it - rr.begin());
    const double t = (r - rr[j - 1]) / (rr[j] - rr[j - 1]);
    return (1 - t) * yy[j - 1] + t * yy[j];
  };

  Potential p;
  p.id = "table(" + file.filename().string() + ")";
  p.dim = dim;
  p.symmetric = p.radial = p.differentiable = true;
  p.nonincreasing = std::is_sorted(vs.rbegin(), vs.rend());
  p.width = rs.back() / 10.0;
  p.V = [rs, vs, interp](const std::array<double, 3>& x) {
    return interp(rs, vs, std::sqrt(norm_sq(x)));
  };
  p.W = [rs, ws, interp](const std::array<double, 3>& x) {
    return interp(rs, ws, std::sqrt(norm_sq(x)));
  };
  return p;
}

double eval_F(const Potential& p, const std::array<double, 3>& x) {
  if (!p.differentiable)
    throw NonDifferentiablePotential("eval_F: potential " + p.id + " has no usable W");
  return 0.5 * p.V(x) + 0.25 * p.W(x);
}

RStarResult find_rstar(const Potential& p, double r_max) {
  if (!p.differentiable)
    throw NonDifferentiablePotential("find_rstar: potential " + p.id + " has no usable W");
  if (!p.radial) throw InvalidArgument("find_rstar: potential must be radial");
  if (r_max <= 0) r_max = 10.0 * p.width;

  auto phi = [&](double r) { return p.eval_radial_V(r) + 0.5 * p.eval_radial_W(r); };
  const int samples = 4096;
  double prev_r = r_max * 1e-9;
  double prev_v = phi(prev_r);
  if (!(prev_v > 0))
    throw NoSignChange("find_rstar: V + W/2 not positive near the origin");

  double lo = 0, hi = 0;
  int changes = 0;
  for (int i = 1; i <= samples; ++i) {
    const double r = r_max * i / samples;
    const double v = phi(r);
    if (prev_v > 0 && v <= 0) {
      if (changes == 0) {
        lo = prev_r;
        hi = r;
      }
      ++changes;
    } else if (prev_v <= 0 && v > 0) {
      ++changes;
    }
    prev_r = r;
    prev_v = v;
  }
  if (changes == 0)
    throw NoSignChange("find_rstar: no sign change of V + W/2 on (0, " +
                       std::to_string(r_max) + "]");

  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) > 0 ? lo : hi) = mid;
  }
  return RStarResult{0.5 * (lo + hi), changes == 1};
}

SplitNorms split_norms(const Potential& p, const Grid& g, double R) {
  if (!(R > 0)) throw InvalidArgument("split_norms: R must be positive");
  Field v = sample_potential(p, g);
  const double q = g.dim == 1 ? 1.0 : g.dim / 2.0;
  std::vector<double> in_terms, out_terms;
  in_terms.reserve(static_cast<std::size_t>(v.size()));
  out_terms.reserve(static_cast<std::size_t>(v.size()));
  const double R2 = R * R;
  for (std::int64_t i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (radius_sq_of(g, i) <= R2)
      in_terms.push_back(a);
    else
      out_terms.push_back(std::pow(a, q));
  }
  SplitNorms s;
  s.inner_l1 = g.cell_volume() * pairwise_sum(in_terms);
  s.outer_ldhalf = std::pow(g.cell_volume() * pairwise_sum(out_terms), 1.0 / q);
  return s;
}

double w_consistency_error(const Potential& p, int samples, std::uint64_t seed) {
  if (!p.differentiable)
    throw NonDifferentiablePotential("w_consistency_error: no usable W for " + p.id);
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> dist(-3.0 * p.width, 3.0 * p.width);
  const double eps = 1e-5;
  double worst = 0;
  for (int s = 0; s < samples; ++s) {
    std::array<double, 3> x{0, 0, 0};
    for (int d = 0; d < p.dim; ++d) x[d] = dist(eng);
    double w_fd = 0;
    for (int d = 0; d < p.dim; ++d) {
      auto xp = x, xm = x;
      xp[d] += eps;
      xm[d] -= eps;
      w_fd += x[d] * (p.V(xp) - p.V(xm)) / (2 * eps);
    }
    const double w = p.W(x);
    worst = std::max(worst, std::abs(w - w_fd) / (1.0 + std::abs(w)));
  }
  return worst;
}

}  // namespace choquard
