#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "choquard/groundstate.hpp"
#include "choquard/metastable.hpp"
#include "choquard/pokhozaev.hpp"
#include "choquard/spectrum.hpp"
#include "choquard/transition.hpp"

namespace choquard {

using json = nlohmann::json;

void to_json(json& j, const EnergyBreakdown& b);
void to_json(json& j, const FlowDiagnostics& d);
void to_json(json& j, const MinimizeResult& r);
void to_json(json& j, const CurveEntry& e);
void to_json(json& j, const ProbeRecord& p);
void to_json(json& j, const GStarResult& r);
void to_json(json& j, const TransitionReport& r);
void to_json(json& j, const PokhozaevReport& r);
void to_json(json& j, const EigenResult& r);
void to_json(json& j, const SaddleResult& r);
void to_json(json& j, const LocalMinimizeResult& r);
void to_json(json& j, const ClrWitnessReport& r);
void to_json(json& j, const SubadditivityReport& r);
void to_json(json& j, const ScalingReport& r);
void to_json(json& j, const TailDecayReport& r);

/// Pretty-printed JSON written through a temp file + rename.
void write_json_atomic(const json& j, const std::filesystem::path& file);

/// CSV/gnuplot table: '#'-prefixed header line, one row per entry,
/// numbers at full round-trip precision.
void write_table(const std::filesystem::path& file, const std::string& header,
                 const std::vector<std::vector<double>>& rows, char sep = ',');

std::string format_double(double v);

}  // namespace choquard
