#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

namespace deepspace {

/// Reproducibility record written next to every output artifact as
/// `<artifact>.manifest.json`.
struct RunManifest {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::map<std::string, std::string> inputs;  // path -> sha256 hex
  std::uint64_t seed = 0;
  std::string version;

  void add_input(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::ordered_json& j);
};

const char* tool_version() noexcept;

std::string sha256_file(const std::filesystem::path& path);

std::filesystem::path manifest_path(const std::filesystem::path& artifact);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& artifact);
RunManifest read_manifest(const std::filesystem::path& artifact);

}  // namespace deepspace
