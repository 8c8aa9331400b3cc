#pragma once

// JSON formats for spin fields, grid partitions and solver results, plus
// small file helpers. Everything here throws clocklat::Error on bad input.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "clocklat/continuum.hpp"
#include "clocklat/lattice.hpp"

namespace clocklat {

using Json = nlohmann::ordered_json;

Json direction_to_json(const Direction& nu);
/// Accepts an array of numbers; all-integer arrays are kept exact and normalized.
Direction direction_from_json(const Json& j, const std::string& field = "normal");

/// {d, eps, N, origin, extent, periodic, shape, phases, frozen}. Phases run row-major over
/// the bounding box with -1 at non-members; frozen lists bounding-box indices.
Json spin_field_to_json(const SpinField& field);
SpinField spin_field_from_json(const Json& j);

/// {d, lambda, origin, extent, value_mode: "S1" | "SN", N, values}.
Json partition_to_json(const GridPartitionField& field);
GridPartitionField partition_from_json(const Json& j);

struct SolverRecord {
  std::string method;
  double energy = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double analytic = 0.0;
  std::uint64_t seed = 0;
  int chains = 0;
  int sweeps = 0;
  std::string field_file;
  std::string config_hash;
};

Json solver_record_to_json(const SolverRecord& rec);

Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
/// Two-space indented dump with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace clocklat
