#pragma once

// Text formats: CSV tables, key=value configuration files and run manifests.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "levrep/ensemble.hpp"

namespace levrep {

inline constexpr std::string_view kToolVersion = "1.0.0";

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shortest-round-trip is not needed; 17 significant digits always round-trip.
std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Comma-separated numbers and/or inclusive ranges `start:stop:step`,
/// e.g. "0.5,1:3:0.5" -> 0.5, 1, 1.5, 2, 2.5, 3.
std::vector<double> parse_number_list(std::string_view text);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

using KeyValues = std::map<std::string, std::string>;

/// `key = value` lines; blank lines and lines starting with '#' are skipped.
KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::filesystem::path& path);

KeyValues config_to_key_values(const EnsembleConfig& config);
/// Overlays recognised keys onto `base`; other keys are ignored.
EnsembleConfig config_from_key_values(const KeyValues& kv, EnsembleConfig base);

struct RunManifest {
  std::string command;
  std::optional<EnsembleConfig> config;  // absent for commands that only read files
  KeyValues settings;  // subcommand-specific flags
  unsigned threads = 1;
  double duration_seconds = 0;
  std::vector<std::pair<std::string, std::string>> outputs;  // name -> file name in the run dir
};

/// Writes the manifest next to the outputs, hashing each listed output.
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

struct ManifestCheck {
  std::vector<std::string> missing;
  std::vector<std::string> mismatched;
  std::size_t checked = 0;
  bool ok() const { return missing.empty() && mismatched.empty(); }
};

/// Re-hashes every output listed in a manifest (paths relative to its directory).
ManifestCheck verify_manifest(const std::filesystem::path& path);

}  // namespace levrep
