#include "choquard/report.hpp"

#include <cstdio>
#include <fstream>

#include "choquard/errors.hpp"

namespace choquard {

void to_json(json& j, const EnergyBreakdown& b) {
  j = json{{"kinetic", b.kinetic},
           {"interaction", b.interaction},
           {"total", b.total},
           {"g", b.g},
           {"m", b.m}};
}

void to_json(json& j, const FlowDiagnostics& d) {
  j = json{{"peak", d.peak}, {"concentration", d.concentration}, {"l4_norm", d.l4}};
}

void to_json(json& j, const MinimizeResult& r) {
  j = json{{"energy", r.energy},
           {"lambda", r.lambda},
           {"residual", r.residual},
           {"status", to_string(r.status)},
           {"iterations", r.iterations},
           {"diagnostics", r.diagnostics},
           {"recorded_e", r.recorded_e()},
           {"constraint_hit", r.constraint_hit}};
}

void to_json(json& j, const CurveEntry& e) {
  j = json{{"g", e.g},
           {"e", e.e},
           {"e_raw", e.e_raw},
           {"status", to_string(e.status)},
           {"iterations", e.iterations},
           {"kinetic", e.kinetic},
           {"l4_norm", e.l4},
           {"concentration", e.concentration}};
}

void to_json(json& j, const ProbeRecord& p) {
  j = json{{"g", p.g},
           {"e", p.e},
           {"e_raw", p.e_raw},
           {"status", to_string(p.status)},
           {"kinetic", p.kinetic},
           {"l4_norm", p.l4},
           {"concentration", p.concentration},
           {"iterations", p.iterations}};
}

void to_json(json& j, const GStarResult& r) {
  j = json{{"g_star", r.g_star},
           {"bracket_lo", r.lo},
           {"bracket_hi", r.hi},
           {"monotone_ok", r.monotone_ok},
           {"trace", r.trace}};
}

void to_json(json& j, const TransitionReport& r) {
  j = json{{"dim", r.dim},
           {"m", r.m},
           {"potential", r.potential_id},
           {"order", to_string(r.order)},
           {"g_star", r.g_star},
           {"bracket_lo", r.bracket_lo},
           {"bracket_hi", r.bracket_hi},
           {"e_zero_tol", r.e_zero_tol},
           {"rho_floor", r.rho_floor},
           {"l4_quartic_first", r.l4_first},
           {"l4_quartic_last", r.l4_last},
           {"gstar_trace", r.gstar_trace},
           {"descent", r.descent},
           {"at_gstar", r.at_gstar}};
}

void to_json(json& j, const PokhozaevReport& r) {
  j = json{{"term_gradient", r.term_gradient},
           {"term_mass", r.term_mass},
           {"term_w", r.term_w},
           {"term_v", r.term_v},
           {"lhs", r.lhs},
           {"rhs", r.rhs},
           {"relative_residual", r.relative_residual}};
}

void to_json(json& j, const EigenResult& r) {
  j = json{{"eigenvalue", r.eigenvalue},
           {"rayleigh_residual", r.rayleigh_residual},
           {"restarts", r.restarts}};
}

void to_json(json& j, const SaddleResult& r) {
  j = json{{"c_mp", r.c_mp},
           {"residual", r.residual},
           {"theta_residual", r.theta_residual},
           {"sweeps", r.sweeps},
           {"converged", r.converged},
           {"barrier_floor", r.barrier_floor},
           {"node_energies", r.node_energies}};
}

void to_json(json& j, const LocalMinimizeResult& r) {
  j = json{{"result", r.base},
           {"constraint_hit", r.constraint_hit},
           {"kinetic_floor", r.kinetic_floor}};
}

void to_json(json& j, const ClrWitnessReport& r) {
  j = json{{"g", r.g_values},
           {"integrals", r.integrals},
           {"floor", r.floor},
           {"non_vanishing", r.non_vanishing},
           {"degenerate", r.degenerate}};
}

void to_json(json& j, const SubadditivityReport& r) {
  j = json{{"e_m1", r.e_m1},
           {"e_m2", r.e_m2},
           {"e_sum", r.e_sum},
           {"tol", r.tol},
           {"holds", r.holds}};
}

void to_json(json& j, const ScalingReport& r) {
  j = json{{"e_m", r.e_m},
           {"e_tm", r.e_tm},
           {"bound", r.bound},
           {"margin", r.margin},
           {"strict", r.strict}};
}

void to_json(json& j, const TailDecayReport& r) {
  j = json{{"fitted_rate", r.fitted_rate},
           {"r_squared", r.r_squared},
           {"shells_used", r.shells_used},
           {"expected_floor", r.expected_floor},
           {"assertion_ok", r.assertion_ok},
           {"assertion_skipped", r.assertion_skipped}};
}

void write_json_atomic(const json& j, const std::filesystem::path& file) {
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw Error("write_json_atomic: cannot open " + tmp);
    os << j.dump(2) << "\n";
    if (!os) throw Error("write_json_atomic: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, file);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_table(const std::filesystem::path& file, const std::string& header,
                 const std::vector<std::vector<double>>& rows, char sep) {
  std::ofstream os(file, std::ios::trunc);
  if (!os) throw Error("write_table: cannot open " + file.string());
  os << "# " << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << sep;
      os << format_double(row[i]);
    }
    os << "\n";
  }
  if (!os) throw Error("write_table: write failed for " + file.string());
}

}  // namespace choquard
