#include "choquard/transition.hpp"

#include <algorithm>
#include <cmath>

#include "choquard/errors.hpp"
#include "choquard/metastable.hpp"
#include "choquard/rng.hpp"
#include "choquard/spectrum.hpp"

namespace choquard {

const char* to_string(TransitionOrder o) {
  switch (o) {
    case TransitionOrder::First: return "first";
    case TransitionOrder::Second: return "second";
    case TransitionOrder::NoTransition: return "no-transition";
    default: return "inconclusive";
  }
}

namespace {

ProbeRecord to_record(double g, const MinimizeResult& r) {
  ProbeRecord p;
  p.g = g;
  p.e = r.recorded_e();
  p.e_raw = r.energy.total;
  p.status = r.status;
  p.kinetic = r.energy.kinetic;
  p.l4 = r.diagnostics.l4;
  p.concentration = r.diagnostics.concentration;
  p.iterations = r.iterations;
  return p;
}

// One bisection probe, warm-started from the nearest bound state found so
// far (the minimizer sequence the continuation argument reasons about).
struct ProbeContext {
  double m;
  const SampledPotential& V;
  const GStarOptions& opts;
  Field warm;
  bool have_warm = false;
  std::vector<ProbeRecord> trace;
  std::uint64_t counter = 0;

  MinimizeResult run(double g) {
    MinimizeOptions mo = opts.minimize;
    mo.seed = mix_seed(opts.minimize.seed, counter++);
    if (opts.warm_start && have_warm) {
      mo.init = InitKind::ProvidedField;
      mo.init_field = &warm;
    }
    MinimizeResult r = minimize_mass(g, m, V, mo);
    trace.push_back(to_record(g, r));
    if (r.status == Status::Converged && r.energy.total < 0) {
      warm = r.u;
      have_warm = true;
    }
    return r;
  }

  bool binds(double g) { return run(g).recorded_e() < -opts.e_neg_tol; }
};

}  // namespace

GStarResult find_gstar(double m, const SampledPotential& V, double g_lo, double g_hi,
                       const GStarOptions& opts) {
  if (!(g_lo > 0) || !(g_hi > g_lo))
    throw InvalidArgument("find_gstar: need 0 < g_lo < g_hi");
  ProbeContext ctx{m, V, opts};

  // Expand until the bracket straddles the predicate change.
  bool hi_binds = ctx.binds(g_hi);
  int budget = opts.max_expansions;
  while (!hi_binds && budget-- > 0) {
    g_hi *= 2;
    hi_binds = ctx.binds(g_hi);
  }
  if (!hi_binds)
    throw BracketNotFound("find_gstar: no binding coupling up to g = " +
                          std::to_string(g_hi));
  bool lo_binds = ctx.binds(g_lo);
  while (lo_binds && budget-- > 0) {
    g_lo *= 0.5;
    lo_binds = ctx.binds(g_lo);
  }
  if (lo_binds)
    throw BracketNotFound("find_gstar: predicate already true at g = " +
                          std::to_string(g_lo) + "; no lower edge found");

  while (g_hi - g_lo > opts.tol_g * g_hi) {
    const double mid = 0.5 * (g_lo + g_hi);
    (ctx.binds(mid) ? g_hi : g_lo) = mid;
  }

  GStarResult res;
  res.lo = g_lo;
  res.hi = g_hi;
  res.g_star = 0.5 * (g_lo + g_hi);
  res.trace = std::move(ctx.trace);
  std::sort(res.trace.begin(), res.trace.end(),
            [](const ProbeRecord& a, const ProbeRecord& b) { return a.g < b.g; });
  res.monotone_ok = true;
  bool bound_seen = false;
  for (const auto& p : res.trace) {
    const bool binds = p.e < -opts.e_neg_tol;
    if (bound_seen && !binds) res.monotone_ok = false;
    bound_seen = bound_seen || binds;
  }
  return res;
}

TransitionReport classify_transition(double m, const SampledPotential& V,
                                     const ClassifyOptions& opts) {
  TransitionReport rep;
  rep.dim = V.grid().dim;
  rep.m = m;
  rep.potential_id = V.descriptor().id;

  GStarOptions gopts = opts.gstar;
  gopts.minimize.seed = mix_seed(opts.seed, 0xC1A55);

  // Binding at an arbitrarily small coupling means there is no transition.
  {
    MinimizeOptions mo = gopts.minimize;
    mo.seed = mix_seed(opts.seed, 1);
    MinimizeResult tiny = minimize_mass(opts.no_transition_probe, m, V, mo);
    rep.at_gstar = to_record(opts.no_transition_probe, tiny);
    if (tiny.recorded_e() < -gopts.e_neg_tol) {
      rep.order = TransitionOrder::NoTransition;
      rep.g_star = 0;
      return rep;
    }
  }

  double lo = opts.bracket_hint_lo > 0 ? opts.bracket_hint_lo : 0.5;
  double hi = opts.bracket_hint_hi > lo ? opts.bracket_hint_hi : 4.0;
  GStarResult gs = find_gstar(m, V, lo, hi, gopts);
  rep.g_star = gs.g_star;
  rep.bracket_lo = gs.lo;
  rep.bracket_hi = gs.hi;
  rep.gstar_trace = gs.trace;

  // Warm-started descent g_j = g*(1 + 2^-j) emulating the minimizer
  // sequence of the critical-coupling argument.
  MinimizeOptions mo = gopts.minimize;
  Field warm;
  bool have_warm = false;
  for (int j = 1; j <= opts.descent_points; ++j) {
    const double gj = gs.g_star * (1.0 + std::pow(2.0, -j));
    MinimizeOptions probe = mo;
    probe.seed = mix_seed(opts.seed, 100 + static_cast<std::uint64_t>(j));
    if (have_warm) {
      probe.init = InitKind::ProvidedField;
      probe.init_field = &warm;
    }
    MinimizeResult r = minimize_mass(gj, m, V, probe);
    rep.descent.push_back(to_record(gj, r));
    if (r.status == Status::Converged) {
      warm = std::move(r.u);
      have_warm = true;
    }
  }

  const double l4p = 4.0;
  auto l4_of = [&](const ProbeRecord& p) { return std::pow(p.l4, l4p); };
  rep.l4_first = rep.descent.empty() ? 0 : l4_of(rep.descent.front());
  rep.l4_last = rep.descent.empty() ? 0 : l4_of(rep.descent.back());

  // Run at the bracket's binding edge, warm-started.
  MinimizeOptions at_opts = mo;
  at_opts.seed = mix_seed(opts.seed, 777);
  if (have_warm) {
    at_opts.init = InitKind::ProvidedField;
    at_opts.init_field = &warm;
  }
  MinimizeResult at_hi = minimize_mass(gs.hi, m, V, at_opts);
  rep.at_gstar = to_record(gs.hi, at_hi);
  rep.e_zero_tol = 1e-5 * std::max(1.0, at_hi.energy.kinetic);
  rep.rho_floor = 0;
  if (rep.dim == 3) {
    const double rho0 = compute_rho0(gs.hi, m, V, opts.rho_cap);
    rep.rho_floor = rho0 * rho0 / 4.0;
  }

  const bool descent_converged =
      !rep.descent.empty() &&
      std::all_of(rep.descent.begin(), rep.descent.end(),
                  [](const ProbeRecord& p) { return p.status == Status::Converged; });
  const double l4_ratio = rep.l4_last > 0 ? rep.l4_first / rep.l4_last
                                          : std::numeric_limits<double>::infinity();

  const bool first_ok = at_hi.status == Status::Converged &&
                        std::abs(at_hi.energy.total) <= rep.e_zero_tol &&
                        2.0 * at_hi.energy.kinetic >= rep.rho_floor &&
                        descent_converged && l4_ratio < 2.0;
  if (first_ok) {
    rep.order = TransitionOrder::First;
    return rep;
  }

  // Second-order check: diagnostics decay along the descent and the flow
  // at the non-binding edge of the bracket vanishes.
  MinimizeOptions lo_opts = at_opts;
  lo_opts.seed = mix_seed(opts.seed, 778);
  if (at_hi.status == Status::Converged) {
    lo_opts.init = InitKind::ProvidedField;
    lo_opts.init_field = &at_hi.u;
  }
  MinimizeResult at_lo = minimize_mass(gs.lo, m, V, lo_opts);
  const bool second_ok = at_lo.status == Status::Vanished && l4_ratio >= 2.0;
  if (second_ok) {
    rep.order = TransitionOrder::Second;
    rep.at_gstar = to_record(gs.lo, at_lo);
    return rep;
  }

  rep.order = TransitionOrder::Inconclusive;
  return rep;
}

ClrWitnessReport clr_witness(double m, const SampledPotential& V,
                             const std::vector<double>& g_desc,
                             const MinimizeOptions& opts) {
  if (V.grid().dim != 3) throw DimensionMismatch("clr_witness: defined for d = 3");
  for (std::size_t i = 1; i < g_desc.size(); ++i)
    if (!(g_desc[i] < g_desc[i - 1]))
      throw InvalidArgument("clr_witness: g sequence must be strictly decreasing");

  ClrWitnessReport rep;
  Field warm;
  bool have_warm = false;
  std::uint64_t k = 0;
  for (double g : g_desc) {
    MinimizeOptions mo = opts;
    mo.seed = mix_seed(opts.seed, 9000 + k++);
    if (have_warm) {
      mo.init = InitKind::ProvidedField;
      mo.init_field = &warm;
    }
    MinimizeResult r = minimize_mass(g, m, V, mo);
    rep.g_values.push_back(g);
    rep.integrals.push_back(clr_integral(r.u, V));
    if (r.status == Status::Converged) {
      warm = std::move(r.u);
      have_warm = true;
    }
  }
  if (rep.integrals.empty()) return rep;
  const double last = rep.integrals.back();
  rep.floor = 0.5 * last;
  rep.degenerate = last == 0;
  rep.non_vanishing =
      !rep.degenerate && std::all_of(rep.integrals.begin(), rep.integrals.end(),
                                     [&](double v) { return v >= rep.floor; });
  return rep;
}

}  // namespace choquard
