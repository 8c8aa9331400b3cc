#pragma once

// Batch front door: `clocklat <subcommand> --config <path> [--seed S] [--threads T] [--out DIR]`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "clocklat/io.hpp"

namespace clocklat {

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::filesystem::path> out;
};

struct ExperimentConfig {
  std::string command;
  Json params;  // command parameters with defaults filled in
  std::filesystem::path out_dir;
  std::filesystem::path base_dir;  // relative input paths resolve against this
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool timing = true;

  /// The resolved config as written next to the outputs (execution-only keys omitted).
  Json resolved() const;
  /// 16 hex digits of FNV-1a over resolved().dump().
  std::string hash() const;
};

const std::vector<std::string>& command_names();

/// Defaults for a command, including the shared keys (command, seed, threads, out, timing).
Json command_defaults(const std::string& command);

/// Parses and validates. Errors name the offending field and carry ErrorKind::Config.
ExperimentConfig parse_config(const std::string& command, const Json& raw, const CliOverrides& overrides = {},
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig parse_config_file(const std::string& command, const std::filesystem::path& path,
                                   const CliOverrides& overrides = {});

/// Runs the command and writes its artifacts. Returns the list of files written.
std::vector<std::filesystem::path> dispatch(const ExperimentConfig& config, std::ostream& log);

/// Process entry: 0 ok, 2 configuration or input error, 3 search refused as too large, 1 anything else.
/// Errors are written to `err` as one JSON object.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace clocklat
