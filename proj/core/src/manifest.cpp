#include "uqsup/manifest.hpp"

#include "json.hpp"
#include "uqsup/error.hpp"
#include "uqsup/text_io.hpp"

namespace uqsup {

std::string_view to_string(Distribution d) {
  return d == Distribution::kNominal ? "nominal" : "ood";
}

std::string_view to_string(Split s) {
  return s == Split::kValidation ? "validation" : "test";
}

Distribution parse_distribution(std::string_view text) {
  if (text == "nominal") return Distribution::kNominal;
  if (text == "ood") return Distribution::kOod;
  throw Error(ErrorCode::kMalformedManifest,
              "distribution must be 'nominal' or 'ood', got '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
  if (text == "validation") return Split::kValidation;
  if (text == "test") return Split::kTest;
  throw Error(ErrorCode::kMalformedManifest,
              "split must be 'validation' or 'test', got '" + std::string(text) + "'");
}

std::string format_manifest(const RunManifest& manifest) {
  nlohmann::ordered_json j;
  j["dataset_tag"] = manifest.dataset_tag;
  j["distribution"] = to_string(manifest.distribution);
  j["split"] = to_string(manifest.split);
  if (manifest.epoch) j["epoch"] = *manifest.epoch;
  if (manifest.dropout_rate) j["dropout_rate"] = *manifest.dropout_rate;
  j["technique_tag"] = manifest.technique_tag;
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedManifest, std::string("manifest is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kMalformedManifest, "manifest must be an object");
  RunManifest m;
  try {
    m.dataset_tag = j.value("dataset_tag", std::string());
    m.technique_tag = j.value("technique_tag", std::string());
    m.distribution = parse_distribution(j.value("distribution", std::string("nominal")));
    m.split = parse_split(j.value("split", std::string("test")));
    if (j.contains("epoch") && !j["epoch"].is_null()) {
      if (!j["epoch"].is_number_integer() || j["epoch"].get<std::int64_t>() < 0) {
        throw Error(ErrorCode::kMalformedManifest, "epoch must be an integer >= 0");
      }
      m.epoch = j["epoch"].get<std::int64_t>();
    }
    if (j.contains("dropout_rate") && !j["dropout_rate"].is_null()) {
      double rate = j["dropout_rate"].get<double>();
      if (!(rate >= 0.0 && rate <= 1.0)) {
        throw Error(ErrorCode::kMalformedManifest, "dropout_rate must lie in [0,1]");
      }
      m.dropout_rate = rate;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedManifest, std::string("bad manifest field: ") + e.what());
  }
  return m;
}

RunManifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path));
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  write_file_atomic(path, format_manifest(manifest));
}

std::filesystem::path manifest_path_for(const std::filesystem::path& tensor_path) {
  auto out = tensor_path;
  out.replace_extension(".manifest.json");
  return out;
}

}  // namespace uqsup
