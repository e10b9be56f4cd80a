#include "choquard/metastable.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "choquard/constants.hpp"
#include "choquard/errors.hpp"
#include "choquard/numeric.hpp"
#include "choquard/spectral.hpp"

namespace choquard {

namespace {

void check_theta_range(double theta, const Potential& p, const Grid& g) {
  const double scale = std::exp(theta) * p.width;
  if (scale < 2.0 * g.spacing || scale > g.box_length / 8.0)
    throw InvalidArgument("theta-out-of-range: dilated kernel scale " +
                          std::to_string(scale) + " leaves the resolvable band");
}

Field sample_dilated(const Potential& p, const Grid& g, double theta, bool use_w) {
  const double shrink = std::exp(-theta);
  Field k(g);
  for (std::int64_t i = 0; i < k.size(); ++i) {
    auto x = point_of(g, i);
    for (int d = 0; d < g.dim; ++d) x[d] *= shrink;
    k[i] = use_w ? p.W(x) : p.V(x);
  }
  return k;
}

double kernel_pairing(const Field& u, const Field& kernel) {
  Field u2(u.grid());
  for (std::int64_t i = 0; i < u.size(); ++i) u2[i] = u[i] * u[i];
  return inner(u2, convolve(kernel, u2));
}

}  // namespace

double augmented_energy(double theta, const Field& u, double g, const Potential& p) {
  check_theta_range(theta, p, u.grid());
  const double kin = std::exp(2 * theta) * 0.5 * grad_norm_sq(u);
  const Field k = sample_dilated(p, u.grid(), theta, false);
  return kin - 0.25 * g * kernel_pairing(u, k);
}

double dtheta_augmented(double theta, const Field& u, double g, const Potential& p) {
  if (!p.differentiable)
    throw NonDifferentiablePotential("dtheta_augmented: " + p.id + " has no usable W");
  check_theta_range(theta, p, u.grid());
  const double kin = std::exp(2 * theta) * grad_norm_sq(u);
  const Field k = sample_dilated(p, u.grid(), theta, true);
  return kin + 0.25 * g * kernel_pairing(u, k);
}

double nonexistence_threshold_g2(double m, const SampledPotential& V) {
  if (V.grid().dim != 3)
    throw DimensionMismatch("nonexistence_threshold_g2: defined for d = 3");
  const Potential& p = V.descriptor();
  if (!p.differentiable)
    throw NonDifferentiablePotential("nonexistence_threshold_g2: " + p.id +
                                     " has no usable W");
  const Grid& g = V.grid();
  std::vector<double> terms(static_cast<std::size_t>(g.num_points()));
  for (std::int64_t i = 0; i < g.num_points(); ++i)
    terms[static_cast<std::size_t>(i)] = std::pow(std::abs(p.W(point_of(g, i))), 1.5);
  const double w_norm = std::pow(g.cell_volume() * pairwise_sum(terms), 2.0 / 3.0);
  if (!std::isfinite(w_norm))
    throw InfiniteWNorm("nonexistence_threshold_g2: ||W||_{3/2} quadrature diverged");
  if (w_norm == 0) return std::numeric_limits<double>::infinity();
  const double cs = functional_constants(3).c_sobolev;
  return 4.0 / (cs * m * w_norm);
}

double compute_rho0(double g_tilde, double m, const SampledPotential& V, double rho_cap) {
  if (V.grid().dim != 3) throw DimensionMismatch("compute_rho0: defined for d = 3");
  const Grid& g = V.grid();
  const auto& consts = functional_constants(3);
  const double c_tail = consts.c_sobolev;  // pairing <= C m ||V2||_{3/2} rho^2
  const double c_inner = consts.c_quartic; // pairing <= C ||V1||_1 sqrt(m) rho^3

  // Smallest R on the box with (g/4) C m ||V_{R,2}||_{3/2} <= 1/4.
  double chosen_R = -1;
  SplitNorms split;
  for (int step = 1; step <= 64; ++step) {
    const double R = 0.5 * g.box_length * step / 64.0;
    split = split_norms(V.descriptor(), g, R);
    if (0.25 * g_tilde * c_tail * m * split.outer_ldhalf <= 0.25) {
      chosen_R = R;
      break;
    }
  }
  if (chosen_R < 0)
    throw NoAdmissibleR("compute_rho0: box cannot push the kernel tail below the "
                        "smallness threshold");
  // Largest rho_0 with (g/4) C ||V_{R,1}||_1 sqrt(m) rho_0 <= 1/8.
  if (split.inner_l1 == 0) return rho_cap;
  const double rho0 = 1.0 / (2.0 * g_tilde * c_inner * split.inner_l1 * std::sqrt(m));
  return std::min(rho_cap, rho0);
}

LocalMinimizeResult local_minimize(double g, double m, const SampledPotential& V,
                                   double rho0, const MinimizeOptions& opts) {
  if (V.grid().dim != 3) throw DimensionMismatch("local_minimize: defined for d = 3");
  if (!(rho0 > 0)) throw InvalidArgument("local_minimize: rho0 must be positive");
  MinimizeOptions guarded = opts;
  const double floor = rho0 * rho0 / 4.0;
  guarded.kinetic_floor = floor * 1.05;  // guard band above the constraint

  LocalMinimizeResult out;
  out.kinetic_floor = guarded.kinetic_floor;
  out.base = minimize_mass(g, m, V, guarded);
  out.constraint_hit = out.base.constraint_hit;
  return out;
}

namespace {

// Per-node work of the string sweep: tangent gradient, energy, lambda.
struct NodeEval {
  Field grad;    // EL residual with the least-squares multiplier
  double energy = 0;
  double gsq = 0;
  double res_norm = 0;
};

NodeEval eval_node(const Field& u, double g, double m, const SampledPotential& V) {
  NodeEval ev;
  std::vector<std::complex<double>> uhat;
  spectral::forward(u, uhat);
  const auto& k2 = spectral::k_squared(u.grid());
  const auto& w = spectral::parseval_weights(u.grid());
  const double quad =
      u.grid().cell_volume() / static_cast<double>(u.grid().num_points());
  std::vector<double> terms(uhat.size());
  for (std::size_t i = 0; i < uhat.size(); ++i)
    terms[i] = w[i] * k2[i] * std::norm(uhat[i]);
  ev.gsq = quad * pairwise_sum(terms);

  Field u2(u.grid());
  for (std::int64_t i = 0; i < u.size(); ++i) u2[i] = u[i] * u[i];
  Field conv = V.convolve_v(u2);
  const double pairing = inner(u2, conv);
  ev.energy = 0.5 * ev.gsq - 0.25 * g * pairing;
  const double lambda = (g * pairing - ev.gsq) / m;

  // -lap u assembled spectrally
  for (std::size_t i = 0; i < uhat.size(); ++i) uhat[i] *= k2[i];
  Field neg_lap(u.grid());
  spectral::inverse(u.grid(), uhat, neg_lap);

  ev.grad = Field(u.grid());
  for (std::int64_t i = 0; i < u.size(); ++i)
    ev.grad[i] = neg_lap[i] + lambda * u[i] - g * conv[i] * u[i];
  ev.res_norm = std::sqrt(mass(ev.grad));
  return ev;
}

void renormalize(Field& u, double m) {
  const double cur = mass(u);
  const double sc = std::sqrt(m / cur);
  for (double& v : u.values()) v *= sc;
}

void enforce_radial(Field& u, double m) {
  for (double& v : u.values()) v = std::abs(v);
  u = rearrange_decreasing(u);
  renormalize(u, m);
}

double node_distance(const Field& a, const Field& b) {
  double s = 0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s * a.grid().cell_volume());
}

// Arc-length redistribution of the open node range [lo, hi] keeping both
// ends anchored; linear interpolation along the polyline then projection
// back to the radial sphere.
void reparametrize(std::vector<Field>& nodes, std::size_t lo, std::size_t hi, double m) {
  if (hi - lo < 2) return;
  std::vector<double> cum(hi - lo + 1, 0.0);
  for (std::size_t k = lo + 1; k <= hi; ++k)
    cum[k - lo] = cum[k - lo - 1] + node_distance(nodes[k], nodes[k - 1]);
  const double total = cum.back();
  if (total <= 0) return;

  std::vector<Field> fresh;
  fresh.reserve(hi - lo - 1);
  for (std::size_t k = lo + 1; k < hi; ++k) {
    const double target = total * static_cast<double>(k - lo) / static_cast<double>(hi - lo);
    std::size_t seg = 1;
    while (seg < cum.size() - 1 && cum[seg] < target) ++seg;
    const double seg_len = cum[seg] - cum[seg - 1];
    const double t = seg_len > 0 ? (target - cum[seg - 1]) / seg_len : 0.0;
    const Field& a = nodes[lo + seg - 1];
    const Field& b = nodes[lo + seg];
    Field mix(a.grid());
    for (std::int64_t i = 0; i < mix.size(); ++i) mix[i] = (1 - t) * a[i] + t * b[i];
    enforce_radial(mix, m);
    fresh.push_back(std::move(mix));
  }
  for (std::size_t k = lo + 1; k < hi; ++k) nodes[k] = std::move(fresh[k - lo - 1]);
}

}  // namespace

SaddleResult mountain_pass(double g, double m, const SampledPotential& V, double rho1,
                           const Field& u1_in, const MountainPassOptions& opts) {
  const Grid& grid = V.grid();
  if (grid.dim != 3) throw DimensionMismatch("mountain_pass: defined for d = 3");
  if (!(rho1 > 0)) throw InvalidArgument("mountain_pass: rho1 must be positive");

  Field u1 = u1_in;
  for (double& v : u1.values()) v = std::abs(v);
  renormalize(u1, m);

  const double barrier = rho1 * rho1 / 8.0;
  const double u1_gsq = grad_norm_sq(u1);
  const double u1_energy = energy(u1, g, V).total;
  if (!(u1_gsq > rho1 * rho1))
    throw GeometryViolated("mountain_pass: ||grad u1|| must exceed rho1");
  if (!(u1_energy < barrier))
    throw GeometryViolated("mountain_pass: E_g(u1) must sit below rho1^2/8");

  const int K = std::max(4, opts.segments);
  const double saddle_tol = opts.saddle_tol > 0 ? opts.saddle_tol : 1e-4 * std::sqrt(m);
  const double dt0 = opts.dt0 > 0 ? opts.dt0 : 0.5 * grid.spacing * grid.spacing;
  const double dt_max = opts.dt_max > 0 ? opts.dt_max : 100.0 * dt0;

  // gamma(0): the flat state, radial with zero gradient, energy ~ 0^-.
  Field flat(grid, 1.0);
  renormalize(flat, m);

  std::vector<Field> nodes;
  nodes.reserve(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    const double t = static_cast<double>(k) / K;
    Field mix(grid);
    for (std::int64_t i = 0; i < mix.size(); ++i)
      mix[i] = (1 - t) * flat[i] + t * u1[i];
    if (k > 0 && k < K) enforce_radial(mix, m);
    else renormalize(mix, m);
    nodes.push_back(std::move(mix));
  }

  SaddleResult result;
  result.barrier_floor = barrier;
  double dt = dt0;
  bool climbing = false;
  int ci_node = -1;
  double prev_window_max = std::numeric_limits<double>::infinity();
  int since_window = 0;

  std::vector<double> energies(nodes.size(), 0.0);
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    // Evaluate and step the inner nodes.
    double emax = -std::numeric_limits<double>::infinity();
    int jmax = -1;
    double ci_res = 0;
    bool bad_step = false;
    for (std::size_t k = 1; k + 1 < nodes.size(); ++k) {
      NodeEval ev = eval_node(nodes[k], g, m, V);
      energies[k] = ev.energy;
      if (ev.energy > emax) {
        emax = ev.energy;
        jmax = static_cast<int>(k);
      }
      Field stepped = nodes[k];
      if (climbing && static_cast<int>(k) == ci_node) {
        // reverse the tangent component: up along the path, down across it
        Field tau(grid);
        for (std::int64_t i = 0; i < tau.size(); ++i)
          tau[i] = nodes[k + 1][i] - nodes[k - 1][i];
        const double tn = std::sqrt(mass(tau));
        if (tn > 0)
          for (double& v : tau.values()) v /= tn;
        const double along = inner(ev.grad, tau);
        for (std::int64_t i = 0; i < stepped.size(); ++i)
          stepped[i] -= dt * (ev.grad[i] - 2.0 * along * tau[i]);
        ci_res = ev.res_norm;
      } else {
        for (std::int64_t i = 0; i < stepped.size(); ++i)
          stepped[i] -= dt * ev.grad[i];
      }
      if (!stepped.all_finite()) {
        bad_step = true;
        break;
      }
      renormalize(stepped, m);
      nodes[k] = std::move(stepped);
    }
    if (bad_step) {
      dt *= 0.5;
      continue;
    }
    energies.front() = energy(nodes.front(), g, V).total;
    energies.back() = u1_energy;
    result.path_history.push_back(emax);
    ++result.sweeps;

    // Reparametrize around the climbing node (or globally before CI).
    const bool reparam_now = !climbing || (sweep % 10 == 0);
    if (reparam_now) {
      if (climbing && ci_node > 0) {
        reparametrize(nodes, 0, static_cast<std::size_t>(ci_node), m);
        reparametrize(nodes, static_cast<std::size_t>(ci_node), nodes.size() - 1, m);
      } else {
        reparametrize(nodes, 0, nodes.size() - 1, m);
      }
    }

    // Arm the climbing image once the barrier estimate stops drifting.
    if (!climbing) {
      if (++since_window >= opts.ci_window) {
        if (std::abs(emax - prev_window_max) < opts.ci_drift_tol) {
          climbing = true;
          ci_node = jmax;
        }
        prev_window_max = emax;
        since_window = 0;
      }
    } else {
      // follow the ridge if the maximum moved
      if (jmax >= 0 && std::abs(jmax - ci_node) > 1) ci_node = jmax;
    }

    if (climbing && ci_node > 0) {
      NodeEval ev = eval_node(nodes[static_cast<std::size_t>(ci_node)], g, m, V);
      const double th = std::abs(
          dtheta_augmented(0.0, nodes[static_cast<std::size_t>(ci_node)], g, V.descriptor()));
      if (ev.res_norm <= saddle_tol && th <= saddle_tol) {
        result.u = nodes[static_cast<std::size_t>(ci_node)];
        result.c_mp = ev.energy;
        result.residual = ev.res_norm;
        result.theta_residual = th;
        result.converged = true;
        result.node_energies = energies;
        return result;
      }
    }
    if (sweep % 20 == 19) dt = std::min(dt * 1.05, dt_max);
    (void)ci_res;
  }

  // Budget exhausted: report the best node without claiming convergence.
  int jmax = 1;
  for (std::size_t k = 1; k + 1 < nodes.size(); ++k)
    if (energies[k] > energies[static_cast<std::size_t>(jmax)]) jmax = static_cast<int>(k);
  NodeEval ev = eval_node(nodes[static_cast<std::size_t>(jmax)], g, m, V);
  result.u = nodes[static_cast<std::size_t>(jmax)];
  result.c_mp = ev.energy;
  result.residual = ev.res_norm;
  result.theta_residual =
      std::abs(dtheta_augmented(0.0, result.u, g, V.descriptor()));
  result.node_energies = energies;
  result.converged = false;
  return result;
}

}  // namespace choquard
