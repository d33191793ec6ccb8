#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "franopt/demand.hpp"
#include "franopt/model.hpp"
#include "franopt/scenarios.hpp"

namespace franopt {

inline constexpr const char* kToolVersion = "0.1.0";

/// A complete, self-describing run description: the network, the demand
/// generator, the diurnal activation profile, every solver knob, and the
/// latency grid (empty means "derive automatically from the instance").
struct ScenarioConfig {
    NetworkInstance topology;  // nodes and links only; requests stay empty
    BuildOptions build{};
    DemandConfig demand{};
    LoadProfile profile{};
    SolverOptions solver{};
    std::size_t workers = 1;
    std::vector<double> latency_grid;  // empty = automatic
};

/// The shipped reference scenario: one OLT, two ONUs each fronting an
/// eNodeB, 11 + 10 user devices chained by D2D within their areas, three
/// requests per device, the built-in diurnal profile, automatic grid.
ScenarioConfig default_config();

/// Sweep-layer options bundled from a config.
SweepOptions sweep_options(const ScenarioConfig& config);

/// Parses and schema-checks a JSON config. Strict: unknown keys raise
/// SchemaError naming the key, malformed JSON raises ParseError carrying
/// line and column, and a topology that fails model validation raises
/// ValidationError. Defaults are filled for every omitted optional field.
ScenarioConfig parse_config_text(const std::string& text);

/// parse_config_text over the file's bytes. Throws IoError when the file
/// cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical resolved dump: every field explicit, fixed key order, shortest
/// round-trip numbers. parse_config_text(dump_config(c)) reproduces c and
/// dumping again reproduces the same bytes (fixed point).
std::string dump_config(const ScenarioConfig& config);

/// FNV-1a 64 over the resolved dump, as 16 lowercase hex digits. Two
/// configs hash equal exactly when their resolved dumps are identical.
std::string config_hash(const ScenarioConfig& config);

/// Locale-free float formatting: shortest form within 17 significant
/// digits, round-trips bit for bit. Used for every CSV number.
std::string format_double(double value);

/// Provenance carried into the results sidecar.
struct RunMeta {
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string tool_version = kToolVersion;
};

/// CSV serialization of a sweep: header
/// `key,policy,status,total_w,proc_w,vm_w,traffic_w,bnb_nodes`, rows
/// sorted by (key, policy), power columns left empty on non-OPTIMAL rows.
std::string results_csv(const SweepResult& result);

/// Sidecar metadata document: tool version, seed, config hash, row count,
/// average saving, excluded keys and the latency grid used. No timestamps,
/// so reruns are byte-identical.
std::string results_meta_json(const SweepResult& result, const RunMeta& meta);

/// Writes results_csv to `csv_path` and results_meta_json next to it (same
/// stem, extension `.meta.json`). Throws IoError when either write fails.
void write_results(const SweepResult& result,
                   const std::filesystem::path& csv_path, const RunMeta& meta);

}  // namespace franopt
