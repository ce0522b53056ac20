#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lexsimp/corpus.hpp"
#include "lexsimp/serializer.hpp"

namespace lexsimp {

inline constexpr std::string_view kToolkitVersion = "0.1.0";
inline constexpr std::string_view kManifestName = "manifest.json";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Everything that determines a command's outputs. Contains no timestamps,
/// so identical runs produce byte-identical manifests.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::optional<SplitSpec> split;
  std::optional<SerializationOptions> serialization;
  nlohmann::ordered_json backend = nlohmann::ordered_json::object();
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<std::uint64_t> seeds;
  std::string version{kToolkitVersion};

  void add_input(const std::filesystem::path& path);

  /// Canonical JSON of the configuration (outputs excluded).
  nlohmann::ordered_json configuration() const;
  /// sha256 of configuration().dump().
  std::string digest() const;

  /// Writes `manifest.json` into `dir`, listing each output with its sha256
  /// and the manifest digest. Replaces any previous manifest there.
  std::filesystem::path write(const std::filesystem::path& dir,
                              const std::vector<std::filesystem::path>& outputs) const;
};

}  // namespace lexsimp
