#pragma once

// UQT1 container for prediction samples.
//
// Layout (all integers and floats little-endian):
//   bytes 0..3   magic 'U' 'Q' 'T' '1'
//   bytes 4..7   u32 header length H
//   next H bytes UTF-8 JSON header, e.g.
//                {"kind":"classifier-softmax","shape":[N,T,C],"dtype":"f32","order":"row-major"}
//                {"kind":"regression","shape":[N,T],"dtype":"f32","order":"row-major"}
//   remainder    N*T*C (or N*T) f32 values, row-major
//
// A point predictor is stored with T = 1.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace uqsup {

enum class TensorKind { kClassifierSoftmax, kRegression };

std::string_view to_string(TensorKind kind);
TensorKind parse_tensor_kind(std::string_view text);

inline constexpr std::array<std::byte, 4> kUqtMagic = {
    std::byte{0x55}, std::byte{0x51}, std::byte{0x54}, std::byte{0x31}};

// Softmax rows must sum to one within this tolerance unless renormalized.
inline constexpr double kDefaultRowSumTolerance = 1e-3;

struct ValidationOptions {
  // Divide each softmax row by its sum instead of rejecting drift.
  bool renormalize = false;
  double row_sum_tolerance = kDefaultRowSumTolerance;
};

// N x T x C classifier softmax samples or N x T regression samples, stored as
// f32. Tensors built through the checked factories (or read from disk) always
// satisfy the container invariants; from_raw skips validation so producers can
// assemble data first and validate once.
class SampleTensor {
 public:
  SampleTensor() = default;

  static SampleTensor classifier(std::size_t inputs, std::size_t samples,
                                 std::size_t classes, std::vector<float> values,
                                 const ValidationOptions& options = {});
  static SampleTensor regression(std::size_t inputs, std::size_t samples,
                                 std::vector<float> values);
  static SampleTensor from_raw(TensorKind kind, std::size_t inputs,
                               std::size_t samples, std::size_t classes,
                               std::vector<float> values);

  // Throws uqsup::Error on the first violated invariant. With renormalize on,
  // classifier rows are rescaled in place before the sum check.
  void validate(const ValidationOptions& options = {});
  void validate_strict() const;

  TensorKind kind() const noexcept { return kind_; }
  bool is_classifier() const noexcept {
    return kind_ == TensorKind::kClassifierSoftmax;
  }
  std::size_t inputs() const noexcept { return inputs_; }
  std::size_t samples() const noexcept { return samples_; }
  // Zero for regression tensors.
  std::size_t classes() const noexcept { return classes_; }
  std::size_t row_width() const noexcept { return is_classifier() ? classes_ : 1; }

  std::span<const float> values() const noexcept { return values_; }

  // Softmax row (classifier) or a single value (regression).
  std::span<const float> row(std::size_t input, std::size_t sample) const {
    return std::span<const float>(values_).subspan(
        (input * samples_ + sample) * row_width(), row_width());
  }
  // All T rows of one input, contiguous.
  std::span<const float> input_block(std::size_t input) const {
    return std::span<const float>(values_).subspan(
        input * samples_ * row_width(), samples_ * row_width());
  }

  // Bitwise comparison of shape and payload.
  friend bool operator==(const SampleTensor& a, const SampleTensor& b);

 private:
  SampleTensor(TensorKind kind, std::size_t inputs, std::size_t samples,
               std::size_t classes, std::vector<float> values)
      : kind_(kind),
        inputs_(inputs),
        samples_(samples),
        classes_(classes),
        values_(std::move(values)) {}

  void check_shape() const;

  TensorKind kind_ = TensorKind::kClassifierSoftmax;
  std::size_t inputs_ = 0;
  std::size_t samples_ = 0;
  std::size_t classes_ = 0;
  std::vector<float> values_;
};

std::vector<std::byte> encode_tensor(const SampleTensor& tensor);
SampleTensor decode_tensor(std::span<const std::byte> bytes,
                           const ValidationOptions& options = {});

SampleTensor read_tensor(const std::filesystem::path& path,
                         const ValidationOptions& options = {});
// Validates first; nothing is written for an invalid tensor. The file appears
// atomically (temp file + rename).
void write_tensor(const SampleTensor& tensor, const std::filesystem::path& path);

}  // namespace uqsup
