#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace uqsup {

enum class Distribution { kNominal, kOod };
enum class Split { kValidation, kTest };

std::string_view to_string(Distribution d);
std::string_view to_string(Split s);
Distribution parse_distribution(std::string_view text);
Split parse_split(std::string_view text);

// Sidecar describing where a dump came from. Stored next to the tensor as
// <stem>.manifest.json.
struct RunManifest {
  std::string dataset_tag;
  Distribution distribution = Distribution::kNominal;
  Split split = Split::kTest;
  std::optional<std::int64_t> epoch;
  std::optional<double> dropout_rate;
  std::string technique_tag;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

std::string format_manifest(const RunManifest& manifest);
// Unknown keys are ignored so producers may record extra provenance.
RunManifest parse_manifest(std::string_view text);

RunManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

// foo/bar.uqt -> foo/bar.manifest.json
std::filesystem::path manifest_path_for(const std::filesystem::path& tensor_path);

}  // namespace uqsup
