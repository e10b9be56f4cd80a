#include "choquard/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "choquard/energy.hpp"
#include "choquard/errors.hpp"
#include "choquard/field_io.hpp"
#include "choquard/metastable.hpp"
#include "choquard/pokhozaev.hpp"
#include "choquard/report.hpp"
#include "choquard/rng.hpp"
#include "choquard/spectrum.hpp"
#include "choquard/transition.hpp"
#include "choquard/version.hpp"

namespace choquard::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// configuration

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "run.dim", "run.n", "run.L", "run.potential", "run.m", "run.seed",
      "run.workers", "run.out",
      "groundstate.g", "groundstate.max_iters", "groundstate.grad_tol",
      "groundstate.vanish_tol", "groundstate.dt0", "groundstate.init",
      "groundstate.init_field", "groundstate.bump_width",
      "sweep.g_lo", "sweep.g_hi", "sweep.steps", "sweep.max_iters",
      "sweep.grad_tol",
      "gstar.g_lo", "gstar.g_hi", "gstar.tol_g", "gstar.e_neg_tol",
      "gstar.max_iters",
      "classify.descent_points", "classify.bracket_lo", "classify.bracket_hi",
      "classify.tol_g", "classify.max_iters",
      "pokhozaev.field", "pokhozaev.g", "pokhozaev.lambda",
      "spectrum.field", "spectrum.g", "spectrum.eig_tol",
      "metastable.mode", "metastable.g", "metastable.rho_cap",
      "metastable.rho1", "metastable.g_tilde", "metastable.segments",
      "metastable.max_sweeps", "metastable.init_field", "metastable.rho0",
      "resume.manifest",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' has non-numeric value '" +
                      it->second + "'");
  }
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, fallback);
  return static_cast<int>(v);
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' has non-integer value '" +
                      it->second + "'");
  }
}

void RunConfig::validate() const {
  for (const auto& [key, value] : kv)
    if (!known_keys().count(key))
      throw ConfigError("config: unknown key '" + key + "'");
}

RunConfig parse_config_file(const fs::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("config: cannot open " + file.string());
  RunConfig cfg;
  std::string line, section = "run";
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: bad section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key=value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: empty key at line " + std::to_string(lineno));
    cfg.kv[section + "." + key] = value;
  }
  return cfg;
}

Potential parse_potential_spec(const std::string& spec, int dim) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::map<std::string, std::string> params;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw ConfigError("potential spec: expected k=v in '" + item + "'");
      params[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
    }
  }
  auto num = [&](const std::string& k, double fallback) {
    auto it = params.find(k);
    if (it == params.end()) {
      if (std::isnan(fallback))
        throw ConfigError("potential spec: missing parameter '" + k + "'");
      return fallback;
    }
    return std::stod(it->second);
  };
  const double nan = std::nan("");
  if (name == "ion_atom") return ion_atom(num("b", nan), dim);
  if (name == "gaussian") return gaussian_potential(num("a", 1.0), num("s", nan), dim);
  if (name == "step") return step_1d(num("eps", nan));
  if (name == "delta") return delta_cell(dim);
  if (name == "table") {
    auto it = params.find("path");
    if (it == params.end()) throw ConfigError("potential spec: table needs path=");
    return table_potential(it->second, dim);
  }
  throw ConfigError("potential spec: unknown potential '" + name + "'");
}

Grid grid_from_config(const RunConfig& cfg) {
  const int dim = cfg.get_int("run.dim", 0);
  const int n = cfg.get_int("run.n", 0);
  const double L = cfg.get_double("run.L", 0);
  try {
    return make_grid(dim, n, L);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

int resolve_workers(const RunConfig& cfg) {
  if (cfg.has("run.workers")) return std::max(1, cfg.get_int("run.workers", 1));
  if (const char* env = std::getenv("CHOQUARD_WORKERS"))
    return std::max(1, std::atoi(env));
  return 1;
}

// ---------------------------------------------------------------------------
// manifest

namespace {

struct StageRecord {
  int index = 0;
  double g = 0;
  std::string file;  // relative to out dir; empty when no dump
  std::uint64_t checksum = 0;
  json scalars;
};

struct Manifest {
  std::string version = kVersion;
  std::string subcommand;
  json config;
  double wall_time_s = 0;
  bool completed = false;
  std::vector<StageRecord> stages;
  json verdicts;
};

json stage_to_json(const StageRecord& s) {
  return json{{"index", s.index},
              {"g", s.g},
              {"file", s.file},
              {"checksum", s.checksum},
              {"scalars", s.scalars}};
}

void save_manifest(const Manifest& man, const fs::path& file) {
  json j{{"version", man.version},
         {"subcommand", man.subcommand},
         {"config", man.config},
         {"wall_time_s", man.wall_time_s},
         {"completed", man.completed},
         {"verdicts", man.verdicts}};
  j["stages"] = json::array();
  for (const auto& s : man.stages) j["stages"].push_back(stage_to_json(s));
  write_json_atomic(j, file);
}

Manifest load_manifest(const fs::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("resume: cannot open manifest " + file.string());
  json j = json::parse(is);
  Manifest man;
  man.version = j.value("version", "");
  man.subcommand = j.value("subcommand", "");
  man.config = j.value("config", json::object());
  man.completed = j.value("completed", false);
  man.verdicts = j.value("verdicts", json::object());
  for (const auto& s : j.value("stages", json::array())) {
    StageRecord r;
    r.index = s.value("index", 0);
    r.g = s.value("g", 0.0);
    r.file = s.value("file", "");
    r.checksum = s.value("checksum", std::uint64_t{0});
    r.scalars = s.value("scalars", json::object());
    man.stages.push_back(r);
  }
  return man;
}

json config_to_json(const RunConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.kv) j[k] = v;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  for (const auto& [k, v] : j.items()) cfg.kv[k] = v.get<std::string>();
  return cfg;
}

MinimizeOptions minimize_options(const RunConfig& cfg, const std::string& section) {
  MinimizeOptions mo;
  mo.max_iters = cfg.get_int(section + ".max_iters", mo.max_iters);
  mo.grad_tol = cfg.get_double(section + ".grad_tol", mo.grad_tol);
  mo.vanish_tol = cfg.get_double(section + ".vanish_tol", mo.vanish_tol);
  mo.dt0 = cfg.get_double(section + ".dt0", mo.dt0);
  mo.bump_width = cfg.get_double(section + ".bump_width", mo.bump_width);
  mo.seed = cfg.get_u64("run.seed", 0);
  const std::string init = cfg.get(section + ".init", "gaussian-bump");
  if (init == "gaussian-bump") mo.init = InitKind::GaussianBump;
  else if (init == "random") mo.init = InitKind::Random;
  else if (init == "provided-field") mo.init = InitKind::ProvidedField;
  else throw ConfigError("config: unknown init kind '" + init + "'");
  return mo;
}

fs::path ensure_out_dir(const RunConfig& cfg) {
  const fs::path out = cfg.get("run.out", "out");
  fs::create_directories(out);
  return out;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

double require_double(const RunConfig& cfg, const std::string& key) {
  if (!cfg.has(key)) throw ConfigError("config: missing required key '" + key + "'");
  return cfg.get_double(key, 0);
}

// ---------------------------------------------------------------------------
// subcommand: groundstate

int run_groundstate(const RunConfig& cfg) {
  const fs::path out = ensure_out_dir(cfg);
  Timer timer;
  const Grid grid = grid_from_config(cfg);
  const Potential pot = parse_potential_spec(cfg.get("run.potential"), grid.dim);
  const SampledPotential V(pot, grid);
  const double g = require_double(cfg, "groundstate.g");
  const double m = cfg.get_double("run.m", 1.0);

  MinimizeOptions mo = minimize_options(cfg, "groundstate");
  Field init;
  if (mo.init == InitKind::ProvidedField) {
    init = load_field(cfg.get("groundstate.init_field"));
    mo.init_field = &init;
  }
  MinimizeResult r = minimize_mass(g, m, V, mo);

  dump_field(r.u, out / "state.chqf");
  json j = r;
  j["potential"] = pot.id;
  write_json_atomic(j, out / "groundstate.json");
  write_table(out / "energy.dat", "g e", {{g, r.recorded_e()}}, ' ');

  Manifest man;
  man.subcommand = "groundstate";
  man.config = config_to_json(cfg);
  StageRecord s;
  s.g = g;
  s.file = "state.chqf";
  s.checksum = file_checksum(out / "state.chqf");
  s.scalars = json{{"e", r.recorded_e()}, {"lambda", r.lambda}};
  man.stages.push_back(s);
  man.completed = true;
  man.wall_time_s = timer.seconds();
  man.verdicts = json{{"status", to_string(r.status)}};
  save_manifest(man, out / "manifest.json");
  std::cout << "groundstate: status=" << to_string(r.status)
            << " e=" << format_double(r.recorded_e()) << " lambda="
            << format_double(r.lambda) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// subcommand: sweep (+ resume support)

struct SweepPlan {
  std::vector<double> g_values;
  double m = 1.0;
};

SweepPlan sweep_plan(const RunConfig& cfg) {
  SweepPlan plan;
  const double lo = require_double(cfg, "sweep.g_lo");
  const double hi = require_double(cfg, "sweep.g_hi");
  const int steps = cfg.get_int("sweep.steps", 10);
  if (!(hi > lo) || steps < 2) throw ConfigError("config: sweep needs g_hi > g_lo, steps >= 2");
  for (int i = 0; i < steps; ++i)
    plan.g_values.push_back(lo + (hi - lo) * i / (steps - 1));
  plan.m = cfg.get_double("run.m", 1.0);
  return plan;
}

// Probes are cold-started and independently seeded so sweep tables are
// bitwise identical for every worker count.
int run_sweep_impl(const RunConfig& cfg, const std::vector<bool>& already_done,
                   std::vector<CurveEntry> prior) {
  const fs::path out = ensure_out_dir(cfg);
  Timer timer;
  const Grid grid = grid_from_config(cfg);
  const Potential pot = parse_potential_spec(cfg.get("run.potential"), grid.dim);
  const SampledPotential V(pot, grid);
  const SweepPlan plan = sweep_plan(cfg);
  const MinimizeOptions base = minimize_options(cfg, "sweep");
  const int workers = resolve_workers(cfg);

  std::vector<CurveEntry> entries(plan.g_values.size());
  std::vector<Field> states(plan.g_values.size());
  for (std::size_t i = 0; i < prior.size() && i < entries.size(); ++i)
    if (i < already_done.size() && already_done[i]) entries[i] = prior[i];

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.g_values.size()) return;
      if (i < already_done.size() && already_done[i]) continue;
      MinimizeOptions mo = base;
      mo.seed = mix_seed(base.seed, i);
      MinimizeResult r = minimize_mass(plan.g_values[i], plan.m, V, mo);
      CurveEntry e;
      e.g = plan.g_values[i];
      e.e = r.recorded_e();
      e.e_raw = r.energy.total;
      e.status = r.status;
      e.iterations = r.iterations;
      e.kinetic = r.energy.kinetic;
      e.l4 = r.diagnostics.l4;
      e.concentration = r.diagnostics.concentration;
      entries[i] = e;
      states[i] = std::move(r.u);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  // Single-writer emission in deterministic g order.
  Manifest man;
  man.subcommand = "sweep";
  man.config = config_to_json(cfg);
  std::vector<std::vector<double>> table;
  json jentries = json::array();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "state_%04zu.chqf", i);
    if (!(i < already_done.size() && already_done[i]) && states[i].size() > 0)
      dump_field(states[i], out / name);
    StageRecord s;
    s.index = static_cast<int>(i);
    s.g = entries[i].g;
    s.file = name;
    s.checksum = file_checksum(out / name);
    s.scalars = json{{"e", entries[i].e}, {"status", to_string(entries[i].status)}};
    man.stages.push_back(s);
    table.push_back({entries[i].g, entries[i].e});
    jentries.push_back(entries[i]);
    save_manifest(man, out / "manifest.json");  // checkpoint per probe
  }
  man.completed = true;
  man.wall_time_s = timer.seconds();
  save_manifest(man, out / "manifest.json");
  write_table(out / "sweep.dat", "g e", table, ' ');
  write_json_atomic(jentries, out / "sweep.json");
  std::ofstream csv(out / "sweep.csv", std::ios::trunc);
  csv << "# g,e,e_raw,status,iterations,kinetic,l4_norm,concentration\n";
  for (const auto& e : entries)
    csv << format_double(e.g) << ',' << format_double(e.e) << ','
        << format_double(e.e_raw) << ',' << to_string(e.status) << ','
        << e.iterations << ',' << format_double(e.kinetic) << ','
        << format_double(e.l4) << ',' << format_double(e.concentration) << "\n";
  std::cout << "sweep: " << entries.size() << " probes done\n";
  return 0;
}

int run_sweep(const RunConfig& cfg) { return run_sweep_impl(cfg, {}, {}); }

int run_resume(const RunConfig& cfg) {
  const fs::path manifest_path = cfg.get("resume.manifest");
  Manifest man = load_manifest(manifest_path);
  if (man.completed) {
    std::cout << "resume: run already complete, nothing to do\n";
    return 0;
  }
  RunConfig orig = config_from_json(man.config);
  orig.validate();
  if (man.subcommand != "sweep")
    throw ConfigError("resume: only sweep manifests can be resumed, got '" +
                      man.subcommand + "'");

  const fs::path out = orig.get("run.out", "out");
  const SweepPlan plan = sweep_plan(orig);
  std::vector<bool> done(plan.g_values.size(), false);
  std::vector<CurveEntry> prior(plan.g_values.size());
  for (const auto& s : man.stages) {
    const fs::path dump = out / s.file;
    if (!fs::exists(dump))
      throw ChecksumMismatch("resume: missing dump " + dump.string());
    if (file_checksum(dump) != s.checksum)
      throw ChecksumMismatch("resume: checksum mismatch for " + dump.string());
    if (s.index >= 0 && s.index < static_cast<int>(done.size())) {
      done[static_cast<std::size_t>(s.index)] = true;
      CurveEntry e;
      e.g = s.g;
      e.e = s.scalars.value("e", 0.0);
      const std::string st = s.scalars.value("status", "converged");
      e.status = st == "vanished" ? Status::Vanished
                 : st == "converged" ? Status::Converged
                                     : Status::BudgetExhausted;
      prior[static_cast<std::size_t>(s.index)] = e;
    }
  }
  return run_sweep_impl(orig, done, prior);
}

// ---------------------------------------------------------------------------
// subcommand: gstar / classify

int run_gstar(const RunConfig& cfg) {
  const fs::path out = ensure_out_dir(cfg);
  Timer timer;
  const Grid grid = grid_from_config(cfg);
  const Potential pot = parse_potential_spec(cfg.get("run.potential"), grid.dim);
  const SampledPotential V(pot, grid);
  const double m = cfg.get_double("run.m", 1.0);

  GStarOptions opts;
  opts.tol_g = cfg.get_double("gstar.tol_g", opts.tol_g);
  opts.e_neg_tol = cfg.get_double("gstar.e_neg_tol", opts.e_neg_tol);
  opts.minimize = minimize_options(cfg, "gstar");
  GStarResult r = find_gstar(m, V, cfg.get_double("gstar.g_lo", 0.5),
                             cfg.get_double("gstar.g_hi", 4.0), opts);

  json j = r;
  j["potential"] = pot.id;
  write_json_atomic(j, out / "gstar.json");
  std::vector<std::vector<double>> rows;
  for (const auto& p : r.trace) rows.push_back({p.g, p.e, static_cast<double>(p.iterations)});
  write_table(out / "gstar_trace.csv", "g,e,iterations", rows);

  Manifest man;
  man.subcommand = "gstar";
  man.config = config_to_json(cfg);
  man.completed = true;
  man.wall_time_s = timer.seconds();
  man.verdicts = json{{"g_star", r.g_star}, {"monotone_ok", r.monotone_ok}};
  save_manifest(man, out / "manifest.json");
  std::cout << "gstar: g*=" << format_double(r.g_star) << " bracket=["
            << format_double(r.lo) << ", " << format_double(r.hi) << "]\n";
  return 0;
}

int run_classify(const RunConfig& cfg) {
  const fs::path out = ensure_out_dir(cfg);
  Timer timer;
  const Grid grid = grid_from_config(cfg);
  const Potential pot = parse_potential_spec(cfg.get("run.potential"), grid.dim);
  const SampledPotential V(pot, grid);
  const double m = cfg.get_double("run.m", 1.0);

  ClassifyOptions opts;
  opts.gstar.tol_g = cfg.get_double("classify.tol_g", optss_default_tol());
  opts.gstar.minimize = minimize_options(cfg, "classify");
  opts.descent_points = cfg.get_int("classify.descent_points", opts.descent_points);
  opts.bracket_hint_lo = cfg.get_double("classify.bracket_lo", 0);
  opts.bracket_hint_hi = cfg.get_double("classify.bracket_hi", 0);
  opts.seed = cfg.get_u64("run.seed", 0);
  TransitionReport rep = classify_transition(m, V, opts);

  write_json_atomic(json(rep), out / "classify.json");
  std::vector<std::vector<double>> rows;
  for (const auto& p : rep.descent)
    rows.push_back({p.g, p.e, p.kinetic, std::pow(p.l4, 4.0), p.concentration});
  write_table(out / "classify_descent.csv", "g,e,kinetic,l4_quartic,concentration", rows);

  Manifest man;
  man.subcommand = "classify";
  man.config = config_to_json(cfg);
  man.completed = true;
  man.wall_time_s = timer.seconds();
  man.verdicts = json{{"order", to_string(rep.order)}, {"g_star", rep.g_star}};
  save_manifest(man, out / "manifest.json");
  std::cout << "classify: order=" << to_string(rep.order)
            << " g*=" << format_double(rep.g_star) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// subcommand: pokhozaev / spectrum

int run_pokhozaev(const RunConfig& cfg) {
  const fs::path out = ensure_out_dir(cfg);
  Field u = load_field(cfg.get("pokhozaev.field"));
  const Potential pot = parse_potential_spec(cfg.get("run.potential"), u.grid().dim);
  const SampledPotential V(pot, u.grid());
  const double g = require_double(cfg, "pokhozaev.g");
  const double lambda = require_double(cfg, "pokhozaev.lambda");
  PokhozaevReport rep = pokhozaev_residual(u, lambda, g, V);
  json j = rep;
  j["potential"] = pot.id;
  write_json_atomic(j, out / "pokhozaev.json");
  std::cout << "pokhozaev: relative_residual=" << format_double(rep.relative_residual)
            << "\n";
  return 0;
}

int run_spectrum(const RunConfig& cfg) {
  const fs::path out = ensure_out_dir(cfg);
  Field u = load_field(cfg.get("spectrum.field"));
  const Potential pot = parse_potential_spec(cfg.get("run.potential"), u.grid().dim);
  const SampledPotential V(pot, u.grid());
  const double g = require_double(cfg, "spectrum.g");
  const double tol = cfg.get_double("spectrum.eig_tol", 1e-8);
  EigenResult r = lowest_eigenpair(u, g, V, tol);
  dump_field(r.eigenfunction, out / "eigenfunction.chqf");
  write_json_atomic(json(r), out / "spectrum.json");
  std::cout << "spectrum: eigenvalue=" << format_double(r.eigenvalue) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// subcommand: metastable

int run_metastable(const RunConfig& cfg) {
  const fs::path out = ensure_out_dir(cfg);
  const Grid grid = grid_from_config(cfg);
  const Potential pot = parse_potential_spec(cfg.get("run.potential"), grid.dim);
  const SampledPotential V(pot, grid);
  const double m = cfg.get_double("run.m", 1.0);
  const std::string mode = cfg.get("metastable.mode", "local");

  if (mode == "g2") {
    const double g2 = nonexistence_threshold_g2(m, V);
    write_json_atomic(json{{"g2", g2}, {"m", m}, {"potential", pot.id}},
                      out / "metastable_g2.json");
    std::cout << "metastable g2=" << format_double(g2) << "\n";
    return 0;
  }
  if (mode == "rho0") {
    const double gt = require_double(cfg, "metastable.g_tilde");
    const double rho0 = compute_rho0(gt, m, V, cfg.get_double("metastable.rho_cap", 1.0));
    write_json_atomic(json{{"rho0", rho0}, {"g_tilde", gt}, {"m", m}},
                      out / "metastable_rho0.json");
    std::cout << "metastable rho0=" << format_double(rho0) << "\n";
    return 0;
  }

  const double g = require_double(cfg, "metastable.g");
  MinimizeOptions mo;
  mo.seed = cfg.get_u64("run.seed", 0);
  Field init;
  const bool have_init = cfg.has("metastable.init_field");
  if (have_init) {
    init = load_field(cfg.get("metastable.init_field"));
    mo.init = InitKind::ProvidedField;
    mo.init_field = &init;
  }

  if (mode == "local") {
    double rho0 = cfg.get_double("metastable.rho0", 0);
    if (rho0 <= 0) rho0 = compute_rho0(g, m, V, cfg.get_double("metastable.rho_cap", 1.0));
    LocalMinimizeResult r = local_minimize(g, m, V, rho0, mo);
    dump_field(r.base.u, out / "local_min.chqf");
    write_json_atomic(json(r), out / "metastable_local.json");
    std::cout << "metastable local: status=" << to_string(r.base.status)
              << " constraint_hit=" << (r.constraint_hit ? "yes" : "no") << "\n";
    return 0;
  }
  if (mode == "saddle") {
    if (!have_init)
      throw ConfigError("config: metastable.init_field (the bound state u1) is required");
    MountainPassOptions opts;
    opts.segments = cfg.get_int("metastable.segments", opts.segments);
    opts.max_sweeps = cfg.get_int("metastable.max_sweeps", opts.max_sweeps);
    opts.seed = mo.seed;
    const double rho1 = require_double(cfg, "metastable.rho1");
    SaddleResult r = mountain_pass(g, m, V, rho1, init, opts);
    dump_field(r.u, out / "saddle.chqf");
    write_json_atomic(json(r), out / "metastable_saddle.json");
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < r.node_energies.size(); ++k)
      rows.push_back({static_cast<double>(k), r.node_energies[k]});
    write_table(out / "saddle_profile.csv", "node,energy", rows);
    std::vector<std::vector<double>> hist;
    for (std::size_t k = 0; k < r.path_history.size(); ++k)
      hist.push_back({static_cast<double>(k), r.path_history[k]});
    write_table(out / "saddle_history.csv", "sweep,max_energy", hist);
    std::cout << "metastable saddle: c_mp=" << format_double(r.c_mp)
              << " converged=" << (r.converged ? "yes" : "no") << "\n";
    return r.converged ? 0 : 1;
  }
  throw ConfigError("config: unknown metastable mode '" + mode + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// selftest

bool selftest(std::ostream& os) {
  int failed = 0;
  auto check = [&](const std::string& name, bool ok) {
    os << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failed;
  };

  try {
    // grid construction and error paths
    Grid g1 = make_grid(1, 64, 32.0);
    check("make_grid spacing", std::abs(g1.spacing - 0.5) < 1e-15);
    bool threw = false;
    try {
      make_grid(2, 100, 10.0);
    } catch (const InvalidArgument&) {
      threw = true;
    }
    check("make_grid rejects non-power-of-two", threw);

    // Gaussian mass quadrature vs analytic sqrt(pi)
    Grid g256 = make_grid(1, 256, 32.0);
    Field gauss(g256);
    for (std::int64_t i = 0; i < gauss.size(); ++i)
      gauss[i] = std::exp(-radius_sq_of(g256, i) / 2.0);
    check("gaussian mass = sqrt(pi)",
          std::abs(mass(gauss) - std::sqrt(3.14159265358979323846)) < 1e-10);

    // delta kernel convolution identity
    SampledPotential delta(delta_cell(1), g256);
    Field conv = delta.convolve_v(gauss);
    double derr = 0;
    for (std::int64_t i = 0; i < conv.size(); ++i)
      derr = std::max(derr, std::abs(conv[i] - gauss[i]));
    check("delta convolution identity", derr < 1e-12);

    // Parseval consistency
    Field rnd = random_smooth_field(g256, 7, 1.0);
    const double lhs = grad_norm_sq(rnd);
    const double rhs = -inner(rnd, laplacian(rnd));
    check("parseval gradient identity", std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, lhs));

    // rearrangement preserves mass
    Field re = rearrange_decreasing(rnd);
    check("rearrangement preserves mass", std::abs(mass(re) - mass(rnd)) < 1e-12);

    // recenter idempotence
    Field shifted = cyclic_shift(gauss, {37, 0, 0});
    Field centered = recenter(shifted);
    Field twice = recenter(centered);
    double rerr = 0;
    for (std::int64_t i = 0; i < centered.size(); ++i)
      rerr = std::max(rerr, std::abs(centered[i] - twice[i]));
    check("recenter idempotent", rerr == 0);

    // potential catalog sanity
    Potential ia = ion_atom(1.0, 3);
    check("ion_atom V(0)", std::abs(ia.V({0, 0, 0}) - 1.0) < 1e-15);
    check("ion_atom W finite differences", w_consistency_error(ia, 100, 11) < 1e-6);
    check("ion_atom r* = b", std::abs(find_rstar(ia).r - 1.0) < 1e-8);
    Potential gp = gaussian_potential(1.0, 1.0, 2);
    check("gaussian r* = sqrt(2)", std::abs(find_rstar(gp).r - std::sqrt(2.0)) < 1e-8);

    // CHQF round trip
    const fs::path tmp = fs::temp_directory_path() / "choquard_selftest.chqf";
    dump_field(rnd, tmp);
    Field back = load_field(tmp);
    bool bitexact = back.grid() == rnd.grid();
    for (std::int64_t i = 0; bitexact && i < rnd.size(); ++i)
      bitexact = back[i] == rnd[i];
    check("CHQF round-trip bit-exact", bitexact);
    fs::remove(tmp);

    // 1D soliton energy, coarse budget
    Grid gs = make_grid(1, 512, 48.0);
    SampledPotential dl(delta_cell(1), gs);
    MinimizeOptions mo;
    mo.max_iters = 20000;
    MinimizeResult sol = minimize_mass(1.0, 1.0, dl, mo);
    check("1d soliton energy -1/96",
          sol.status == Status::Converged &&
              std::abs(sol.energy.total + 1.0 / 96.0) < 1e-4 / 96.0);
  } catch (const std::exception& e) {
    os << "[FAIL] selftest aborted: " << e.what() << "\n";
    ++failed;
  }
  os << (failed ? "selftest: FAILURES present\n" : "selftest: all green\n");
  return failed == 0;
}

int run(const std::string& subcommand, RunConfig cfg) {
  try {
    cfg.validate();
    if (subcommand == "selftest") return selftest(std::cout) ? 0 : 1;
    if (subcommand == "groundstate") return run_groundstate(cfg);
    if (subcommand == "sweep") return run_sweep(cfg);
    if (subcommand == "gstar") return run_gstar(cfg);
    if (subcommand == "classify") return run_classify(cfg);
    if (subcommand == "pokhozaev") return run_pokhozaev(cfg);
    if (subcommand == "spectrum") return run_spectrum(cfg);
    if (subcommand == "metastable") return run_metastable(cfg);
    if (subcommand == "resume") return run_resume(cfg);
    throw ConfigError("unknown subcommand '" + subcommand + "'");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace choquard::cli
