#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "choquard/grid.hpp"
#include "choquard/potential.hpp"

namespace choquard::cli {

/// Flat section.key -> value configuration. Keys are validated against the
/// known-key table before any computation; unknown keys are rejected by
/// name. Flags and files land in the same map.
struct RunConfig {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

  /// Throws ConfigError naming the first unknown key.
  void validate() const;
};

/// INI-style parse: [section] headers, key = value lines, '#' comments.
RunConfig parse_config_file(const std::filesystem::path& file);

/// "name:k=v,k=v" potential specification, e.g. "ion_atom:b=1".
Potential parse_potential_spec(const std::string& spec, int dim);

Grid grid_from_config(const RunConfig& cfg);

/// Worker count resolution: config value, else CHOQUARD_WORKERS, else 1.
int resolve_workers(const RunConfig& cfg);

/// Executes one subcommand: groundstate, sweep, gstar, classify,
/// pokhozaev, spectrum, metastable, selftest, resume.
/// Returns the process exit code (0 ok, 1 computation failed, 2 bad config).
int run(const std::string& subcommand, RunConfig cfg);

/// The quick invariant suite behind `selftest`; prints one line per check.
bool selftest(std::ostream& os);

}  // namespace choquard::cli
