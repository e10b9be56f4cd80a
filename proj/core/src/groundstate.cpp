#include "choquard/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "choquard/errors.hpp"
#include "choquard/numeric.hpp"
#include "choquard/rng.hpp"
#include "choquard/spectral.hpp"

namespace choquard {

const char* to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::Vanished: return "vanished";
    default: return "budget-exhausted";
  }
}

double MinimizeResult::recorded_e() const {
  if (status == Status::Vanished) return 0.0;
  return std::min(energy.total, 0.0);
}

namespace {

// Everything the flow tracks about the current iterate. The spectrum, the
// convolution V*u^2 and the pairing <u^2, V*u^2> are kept in sync so one
// accepted step costs four transforms.
struct FlowState {
  Field u;
  std::vector<std::complex<double>> uhat;
  Field conv;      // V * u^2
  double pairing;  // int (V*u^2) u^2
  double gsq;      // ||grad u||^2
  double energy;   // E_g(u)
};

class Flow {
 public:
  Flow(double g, double m, const SampledPotential& V, const MinimizeOptions& opts)
      : g_(g), m_(m), V_(V), grid_(V.grid()), opts_(opts) {
    if (!(g > 0)) throw InvalidArgument("minimize_mass: g must be positive");
    if (!(m > 0)) throw InvalidArgument("minimize_mass: m must be positive");
    k2_ = &spectral::k_squared(grid_);
    w_ = &spectral::parseval_weights(grid_);
    quad_ = grid_.cell_volume() / static_cast<double>(grid_.num_points());
  }

  MinimizeResult run() {
    FlowState s = initial_state();
    const double dt0 = opts_.dt0 > 0 ? opts_.dt0 : 0.5 * grid_.spacing * grid_.spacing;
    const double dt_max = opts_.dt_max > 0 ? opts_.dt_max : 1000.0 * dt0;
    double dt = dt0;
    int accepts_in_row = 0;
    int stuck = 0;

    // Vanishing needs 200 consecutive iterations of sub-threshold
    // concentration with a non-increasing peak, probed on a fixed cadence.
    const int check_every = 25;
    const int window_checks = 200 / check_every;
    int vanish_streak = 0;
    double prev_peak = std::numeric_limits<double>::infinity();

    std::vector<std::complex<double>> cuhat;
    int iter = 0;
    for (; iter < opts_.max_iters; ++iter) {
      // cu = (V*u^2) u drives both the residual and the step.
      Field cu(grid_);
      for (std::int64_t i = 0; i < s.u.size(); ++i) cu[i] = s.conv[i] * s.u[i];
      spectral::forward(cu, cuhat);

      const double lambda = (g_ * s.pairing - s.gsq) / m_;
      const double res = residual_norm(s, lambda, cuhat);
      const bool residual_ok = res <= opts_.grad_tol * std::sqrt(m_);

      if (opts_.kinetic_floor > 0 && s.gsq <= opts_.kinetic_floor) {
        auto r = finish(std::move(s), lambda, res, Status::BudgetExhausted, iter);
        r.constraint_hit = true;
        return r;
      }

      if (residual_ok) {
        const double conc = block_mass_sup(s.u);
        const bool concentrated = conc >= opts_.vanish_tol * std::sqrt(m_);
        return finish(std::move(s), lambda, res,
                      concentrated ? Status::Converged : Status::Vanished, iter);
      }

      if (iter % check_every == 0) {
        const double conc = block_mass_sup(s.u);
        const double peak = max_abs(s.u);
        if (conc < opts_.vanish_tol * std::sqrt(m_) && peak <= prev_peak * (1 + 1e-12)) {
          if (++vanish_streak >= window_checks)
            return finish(std::move(s), lambda, res, Status::Vanished, iter);
        } else {
          vanish_streak = 0;
        }
        prev_peak = peak;
      }

      // One backtracked step; cuhat stays valid while dt shrinks.
      int halvings = 0;
      bool accepted = false;
      for (;;) {
        FlowState cand = step(s, lambda, dt, cuhat);
        if (!std::isfinite(cand.energy) || !std::isfinite(cand.gsq)) {
          dt *= 0.5;
          if (++halvings > 30)
            throw NanEncountered("minimize_mass: step kept producing non-finite values");
          continue;
        }
        if (cand.energy <= s.energy + 1e-12 * (1 + std::abs(s.energy))) {
          s = std::move(cand);
          accepted = true;
          if (++accepts_in_row >= 5) {
            dt = std::min(dt * 1.2, dt_max);
            accepts_in_row = 0;
          }
          break;
        }
        dt *= 0.5;
        accepts_in_row = 0;
        if (++halvings > 60) break;  // flat to rounding at every step size
      }
      if (!accepted) {
        dt = dt0;
        if (++stuck >= 5) {
          const double l2 = (g_ * s.pairing - s.gsq) / m_;
          return finish(std::move(s), l2, res, Status::BudgetExhausted, iter);
        }
      } else {
        stuck = 0;
      }

      if (opts_.recenter_every > 0 && (iter + 1) % opts_.recenter_every == 0)
        recenter_state(s);
    }

    const double lambda = (g_ * s.pairing - s.gsq) / m_;
    Field cu(grid_);
    for (std::int64_t i = 0; i < s.u.size(); ++i) cu[i] = s.conv[i] * s.u[i];
    spectral::forward(cu, cuhat);
    const double res = residual_norm(s, lambda, cuhat);
    return finish(std::move(s), lambda, res, Status::BudgetExhausted, iter);
  }

 private:
  FlowState initial_state() {
    Field u0;
    switch (opts_.init) {
      case InitKind::GaussianBump: {
        const double width =
            opts_.bump_width > 0 ? opts_.bump_width : grid_.box_length / 16.0;
        u0 = gaussian_bump(grid_, width, m_);
        break;
      }
      case InitKind::Random:
        u0 = random_smooth_field(grid_, opts_.seed, m_);
        break;
      case InitKind::ProvidedField: {
        if (!opts_.init_field) throw InvalidArgument("minimize_mass: init field missing");
        if (!(opts_.init_field->grid() == grid_))
          throw GridMismatch("minimize_mass: init field grid mismatch");
        u0 = *opts_.init_field;
        const double m0 = mass(u0);
        if (m0 <= 0) throw ZeroField("minimize_mass: init field has zero mass");
        const double sc = std::sqrt(m_ / m0);
        for (double& v : u0.values()) v *= sc;
        break;
      }
    }
    return rebuild(std::move(u0));
  }

  FlowState rebuild(Field u) {
    FlowState s;
    s.u = std::move(u);
    spectral::forward(s.u, s.uhat);
    Field u2(grid_);
    for (std::int64_t i = 0; i < s.u.size(); ++i) u2[i] = s.u[i] * s.u[i];
    s.conv = V_.convolve_v(u2);
    s.pairing = inner(u2, s.conv);
    s.gsq = spectral_gsq(s.uhat);
    s.energy = 0.5 * s.gsq - 0.25 * g_ * s.pairing;
    return s;
  }

  double spectral_gsq(const std::vector<std::complex<double>>& uhat) const {
    std::vector<double> terms(uhat.size());
    for (std::size_t i = 0; i < uhat.size(); ++i)
      terms[i] = (*w_)[i] * (*k2_)[i] * std::norm(uhat[i]);
    return quad_ * pairwise_sum(terms);
  }

  double spectral_mass(const std::vector<std::complex<double>>& uhat) const {
    std::vector<double> terms(uhat.size());
    for (std::size_t i = 0; i < uhat.size(); ++i)
      terms[i] = (*w_)[i] * std::norm(uhat[i]);
    return quad_ * pairwise_sum(terms);
  }

  double residual_norm(const FlowState& s, double lambda,
                       const std::vector<std::complex<double>>& cuhat) const {
    std::vector<double> terms(cuhat.size());
    for (std::size_t i = 0; i < cuhat.size(); ++i) {
      const std::complex<double> r = ((*k2_)[i] + lambda) * s.uhat[i] - g_ * cuhat[i];
      terms[i] = (*w_)[i] * std::norm(r);
    }
    return std::sqrt(std::max(0.0, quad_ * pairwise_sum(terms)));
  }

  FlowState step(const FlowState& s, double lambda, double dt,
                 const std::vector<std::complex<double>>& cuhat) const {
    FlowState next;
    next.uhat.resize(s.uhat.size());
    if (opts_.explicit_step) {
      for (std::size_t i = 0; i < s.uhat.size(); ++i)
        next.uhat[i] =
            s.uhat[i] * (1.0 - dt * (lambda + (*k2_)[i])) + dt * g_ * cuhat[i];
    } else {
      for (std::size_t i = 0; i < s.uhat.size(); ++i)
        next.uhat[i] =
            (s.uhat[i] * (1.0 - dt * lambda) + dt * g_ * cuhat[i]) / (1.0 + dt * (*k2_)[i]);
    }

    const double raw_mass = spectral_mass(next.uhat);
    if (!(raw_mass > 0) || !std::isfinite(raw_mass)) {
      next.energy = std::numeric_limits<double>::quiet_NaN();
      next.gsq = std::numeric_limits<double>::quiet_NaN();
      return next;
    }
    const double sc = std::sqrt(m_ / raw_mass);
    for (auto& z : next.uhat) z *= sc;

    auto scratch = next.uhat;  // c2r destroys its input
    next.u = Field(grid_);
    spectral::inverse(grid_, scratch, next.u);

    Field u2(grid_);
    for (std::int64_t i = 0; i < next.u.size(); ++i) u2[i] = next.u[i] * next.u[i];
    next.conv = V_.convolve_v(u2);
    next.pairing = inner(u2, next.conv);
    next.gsq = spectral_gsq(next.uhat);
    next.energy = 0.5 * next.gsq - 0.25 * g_ * next.pairing;
    return next;
  }

  void recenter_state(FlowState& s) {
    Field centered = recenter(s.u);
    if (std::equal(centered.values().begin(), centered.values().end(),
                   s.u.values().begin()))
      return;
    s = rebuild(std::move(centered));
  }

  MinimizeResult finish(FlowState s, double lambda, double res, Status st, int iters) {
    MinimizeResult r;
    r.diagnostics.peak = max_abs(s.u);
    r.diagnostics.concentration = block_mass_sup(s.u);
    r.diagnostics.l4 = lp_norm(s.u, 4);
    r.energy.kinetic = 0.5 * s.gsq;
    r.energy.interaction = 0.25 * s.pairing;
    r.energy.total = s.energy;
    r.energy.g = g_;
    r.energy.m = m_;
    r.lambda = lambda;
    r.residual = res;
    r.status = st;
    r.iterations = iters;
    r.u = std::move(s.u);
    return r;
  }

  double g_, m_;
  const SampledPotential& V_;
  Grid grid_;
  MinimizeOptions opts_;
  const std::vector<double>* k2_;
  const std::vector<double>* w_;
  double quad_;
};

}  // namespace

MinimizeResult minimize_mass(double g, double m, const SampledPotential& V,
                             const MinimizeOptions& opts) {
  return Flow(g, m, V, opts).run();
}

MinimizeResult minimize_mass(double g, double m, const Potential& p, const Grid& grid,
                             const MinimizeOptions& opts) {
  SampledPotential V(p, grid);
  return minimize_mass(g, m, V, opts);
}

std::vector<CurveEntry> energy_curve(const std::vector<double>& g_list, double m,
                                     const SampledPotential& V, const MinimizeOptions& opts,
                                     bool warm_start, std::vector<Field>* states) {
  for (std::size_t i = 1; i < g_list.size(); ++i)
    if (!(g_list[i] > g_list[i - 1]))
      throw InvalidArgument("energy_curve: g list must be strictly increasing");

  std::vector<CurveEntry> table;
  table.reserve(g_list.size());
  Field warm;
  bool have_warm = false;
  for (std::size_t i = 0; i < g_list.size(); ++i) {
    MinimizeOptions probe = opts;
    probe.seed = mix_seed(opts.seed, i);
    if (warm_start && have_warm) {
      probe.init = InitKind::ProvidedField;
      probe.init_field = &warm;
    }
    MinimizeResult r = minimize_mass(g_list[i], m, V, probe);
    CurveEntry e;
    e.g = g_list[i];
    e.e = r.recorded_e();
    e.e_raw = r.energy.total;
    e.status = r.status;
    e.iterations = r.iterations;
    e.kinetic = r.energy.kinetic;
    e.l4 = r.diagnostics.l4;
    e.concentration = r.diagnostics.concentration;
    table.push_back(e);
    if (states) states->push_back(r.u);
    if (r.status == Status::Converged) {
      warm = std::move(r.u);
      have_warm = true;
    }
  }
  return table;
}

SubadditivityReport check_subadditivity(double g, double m1, double m2,
                                        const SampledPotential& V,
                                        const MinimizeOptions& opts) {
  if (!(m1 > 0) || !(m2 > 0))
    throw InvalidArgument("check_subadditivity: masses must be positive");
  SubadditivityReport rep;
  rep.e_m1 = minimize_mass(g, m1, V, opts).recorded_e();
  rep.e_m2 = minimize_mass(g, m2, V, opts).recorded_e();
  rep.e_sum = minimize_mass(g, m1 + m2, V, opts).recorded_e();
  rep.tol = 1e-5 * (1 + std::abs(rep.e_sum));
  rep.holds = rep.e_sum <= rep.e_m1 + rep.e_m2 + rep.tol;
  return rep;
}

ScalingReport check_strict_scaling(double g, double m, double t, const SampledPotential& V,
                                   const MinimizeOptions& opts) {
  if (!(t > 1)) throw InvalidArgument("check_strict_scaling: t must exceed 1");
  ScalingReport rep;
  rep.e_m = minimize_mass(g, m, V, opts).recorded_e();
  rep.e_tm = minimize_mass(g, t * m, V, opts).recorded_e();
  rep.margin = 1e-6 * std::abs(rep.e_m);
  rep.bound = t * t * rep.e_m - rep.margin;
  rep.strict = rep.e_tm < rep.bound;
  return rep;
}

TailDecayReport tail_decay_report(const Field& u, double lambda) {
  const Grid& g = u.grid();
  const double r_lo = 0.25 * g.box_length;
  const double r_hi = 0.40 * g.box_length;
  const int nbins = std::max(1, static_cast<int>((r_hi - r_lo) / g.spacing));

  std::vector<double> sum(static_cast<std::size_t>(nbins), 0.0);
  std::vector<int> cnt(static_cast<std::size_t>(nbins), 0);
  for (std::int64_t i = 0; i < u.size(); ++i) {
    const double r = std::sqrt(radius_sq_of(g, i));
    if (r < r_lo || r >= r_hi) continue;
    const double a = std::abs(u[i]);
    if (a < 1e-14) continue;
    const int b = std::min(nbins - 1, static_cast<int>((r - r_lo) / g.spacing));
    sum[static_cast<std::size_t>(b)] += std::log(a);
    cnt[static_cast<std::size_t>(b)] += 1;
  }

  std::vector<double> xs, ys;
  for (int b = 0; b < nbins; ++b) {
    if (cnt[static_cast<std::size_t>(b)] == 0) continue;
    xs.push_back(r_lo + (b + 0.5) * g.spacing);
    ys.push_back(sum[static_cast<std::size_t>(b)] / cnt[static_cast<std::size_t>(b)]);
  }

  TailDecayReport rep;
  rep.shells_used = static_cast<int>(xs.size());
  rep.expected_floor = lambda > 0 ? 0.5 * std::sqrt(lambda) / 2.0 : 0.0;
  if (xs.size() < 2) throw InsufficientTail("tail_decay_report: no usable tail shells");

  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  if (*ymax - *ymin < 1e-12)
    throw InsufficientTail("tail_decay_report: shell profile carries no decay signal");

  // least squares fit of log|u| = a - rate * r
  const double N = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double denom = N * sxx - sx * sx;
  const double slope = (N * sxy - sx * sy) / denom;
  rep.fitted_rate = -slope;
  const double corr_den =
      std::sqrt(std::max(1e-300, (N * sxx - sx * sx) * (N * syy - sy * sy)));
  const double corr = (N * sxy - sx * sy) / corr_den;
  rep.r_squared = corr * corr;

  if (rep.shells_used < 10) {
    rep.assertion_skipped = true;
  } else {
    rep.assertion_ok = rep.fitted_rate >= rep.expected_floor;
  }
  return rep;
}

}  // namespace choquard
