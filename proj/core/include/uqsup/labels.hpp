#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uqsup/tensor_io.hpp"

namespace uqsup {

// Ground truth aligned with a SampleTensor: class indices for classifiers,
// real targets for regression. Exactly one of the two vectors is populated.
struct LabelVector {
  TensorKind kind = TensorKind::kClassifierSoftmax;
  std::vector<std::int32_t> classes;
  std::vector<double> targets;

  std::size_t size() const noexcept {
    return kind == TensorKind::kClassifierSoftmax ? classes.size() : targets.size();
  }
  double value(std::size_t i) const {
    return kind == TensorKind::kClassifierSoftmax ? static_cast<double>(classes[i])
                                                  : targets[i];
  }
};

// Parses "index,label" CSV. Indices must run 0,1,2,... without gaps or
// duplicates. When class_count is given, class labels must lie in [0, C).
LabelVector parse_labels(std::string_view text, TensorKind kind,
                         std::optional<std::size_t> class_count = std::nullopt);
LabelVector read_labels(const std::filesystem::path& path, TensorKind kind,
                        std::optional<std::size_t> class_count = std::nullopt);

std::string format_labels(const LabelVector& labels);
void write_labels(const LabelVector& labels, const std::filesystem::path& path);

// Throws kLengthMismatch / kClassOutOfRange / kWrongTensorKind.
void check_aligned(const SampleTensor& tensor, const LabelVector& labels);

}  // namespace uqsup
