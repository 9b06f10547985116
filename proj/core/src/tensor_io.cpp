#include "uqsup/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "json.hpp"
#include "uqsup/error.hpp"
#include "uqsup/text_io.hpp"

namespace uqsup {
namespace {

constexpr std::size_t kPrefixBytes = 8;

void put_u32_le(std::vector<std::byte>& out, std::uint32_t value) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::byte>((value >> shift) & 0xFFu));
  }
}

std::uint32_t get_u32_le(std::span<const std::byte> bytes) {
  std::uint32_t value = 0;
  for (int i = 3; i >= 0; --i) {
    value = (value << 8) | std::to_integer<std::uint32_t>(bytes[i]);
  }
  return value;
}

std::string format_sum(double sum) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", sum);
  return buf;
}

std::size_t shape_value(const nlohmann::json& v) {
  if (!v.is_number_unsigned()) {
    throw Error(ErrorCode::kMalformedHeader, "shape entries must be non-negative integers");
  }
  return v.get<std::size_t>();
}

}  // namespace

std::string_view to_string(TensorKind kind) {
  return kind == TensorKind::kClassifierSoftmax ? "classifier-softmax" : "regression";
}

TensorKind parse_tensor_kind(std::string_view text) {
  if (text == "classifier-softmax") return TensorKind::kClassifierSoftmax;
  if (text == "regression") return TensorKind::kRegression;
  throw Error(ErrorCode::kMalformedHeader, "unknown tensor kind '" + std::string(text) + "'");
}

SampleTensor SampleTensor::classifier(std::size_t inputs, std::size_t samples,
                                      std::size_t classes, std::vector<float> values,
                                      const ValidationOptions& options) {
  SampleTensor tensor(TensorKind::kClassifierSoftmax, inputs, samples, classes,
                      std::move(values));
  tensor.validate(options);
  return tensor;
}

SampleTensor SampleTensor::regression(std::size_t inputs, std::size_t samples,
                                      std::vector<float> values) {
  SampleTensor tensor(TensorKind::kRegression, inputs, samples, 0, std::move(values));
  tensor.validate();
  return tensor;
}

SampleTensor SampleTensor::from_raw(TensorKind kind, std::size_t inputs,
                                    std::size_t samples, std::size_t classes,
                                    std::vector<float> values) {
  return SampleTensor(kind, inputs, samples,
                      kind == TensorKind::kRegression ? 0 : classes, std::move(values));
}

void SampleTensor::check_shape() const {
  if (samples_ < 1) throw Error(ErrorCode::kInvalidShape, "sample count T must be >= 1");
  if (is_classifier() && classes_ < 2) {
    throw Error(ErrorCode::kInvalidShape, "classifier tensors need C >= 2");
  }
  if (values_.size() != inputs_ * samples_ * row_width()) {
    throw Error(ErrorCode::kPayloadLengthMismatch, "payload length mismatch");
  }
}

void SampleTensor::validate(const ValidationOptions& options) {
  check_shape();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::kNonFiniteValue,
                  "non-finite value at flat offset " + std::to_string(i));
    }
  }
  if (!is_classifier()) return;

  const std::size_t rows = inputs_ * samples_;
  for (std::size_t r = 0; r < rows; ++r) {
    std::span<float> row(values_.data() + r * classes_, classes_);
    double sum = 0.0;
    for (float p : row) {
      if (p < 0.0f || (!options.renormalize && p > 1.0f)) {
        throw Error(ErrorCode::kSoftmaxEntryOutOfRange,
                    "softmax entry outside [0,1] in row " + std::to_string(r));
      }
      sum += p;
    }
    if (options.renormalize) {
      if (sum <= 0.0) {
        throw Error(ErrorCode::kSoftmaxRowSum,
                    "softmax row " + std::to_string(r) + " sums to zero");
      }
      for (float& p : row) p = static_cast<float>(static_cast<double>(p) / sum);
      continue;
    }
    if (std::abs(sum - 1.0) > options.row_sum_tolerance) {
      throw Error(ErrorCode::kSoftmaxRowSum,
                  "softmax row sum " + format_sum(sum) + " exceeds tolerance");
    }
  }
}

void SampleTensor::validate_strict() const {
  SampleTensor copy = *this;
  copy.validate();
}

bool operator==(const SampleTensor& a, const SampleTensor& b) {
  if (a.kind_ != b.kind_ || a.inputs_ != b.inputs_ || a.samples_ != b.samples_ ||
      a.classes_ != b.classes_ || a.values_.size() != b.values_.size()) {
    return false;
  }
  return std::memcmp(a.values_.data(), b.values_.data(),
                     a.values_.size() * sizeof(float)) == 0;
}

std::vector<std::byte> encode_tensor(const SampleTensor& tensor) {
  nlohmann::ordered_json header;
  header["kind"] = to_string(tensor.kind());
  if (tensor.is_classifier()) {
    header["shape"] = {tensor.inputs(), tensor.samples(), tensor.classes()};
  } else {
    header["shape"] = {tensor.inputs(), tensor.samples()};
  }
  header["dtype"] = "f32";
  header["order"] = "row-major";
  const std::string text = header.dump();

  std::vector<std::byte> out;
  out.reserve(kPrefixBytes + text.size() + tensor.values().size() * 4);
  for (std::byte b : kUqtMagic) out.push_back(b);
  put_u32_le(out, static_cast<std::uint32_t>(text.size()));
  for (char ch : text) out.push_back(static_cast<std::byte>(ch));
  for (float v : tensor.values()) put_u32_le(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

SampleTensor decode_tensor(std::span<const std::byte> bytes,
                           const ValidationOptions& options) {
  if (bytes.size() < 4 || !std::equal(kUqtMagic.begin(), kUqtMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::kBadMagic, "bad magic: not a UQT1 file");
  }
  if (bytes.size() < kPrefixBytes) {
    throw Error(ErrorCode::kTruncatedHeader, "file ends inside the header length");
  }
  const std::uint32_t header_len = get_u32_le(bytes.subspan(4, 4));
  if (bytes.size() - kPrefixBytes < header_len) {
    throw Error(ErrorCode::kTruncatedHeader, "file ends inside the JSON header");
  }
  auto header_bytes = bytes.subspan(kPrefixBytes, header_len);
  std::string header_text(reinterpret_cast<const char*>(header_bytes.data()),
                          header_bytes.size());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedHeader, std::string("header is not JSON: ") + e.what());
  }
  if (!header.is_object() || !header.contains("kind") || !header.contains("shape") ||
      !header["kind"].is_string() || !header["shape"].is_array()) {
    throw Error(ErrorCode::kMalformedHeader, "header needs 'kind' and 'shape'");
  }
  if (header.value("dtype", std::string("f32")) != "f32") {
    throw Error(ErrorCode::kMalformedHeader, "only dtype f32 is supported");
  }
  if (header.value("order", std::string("row-major")) != "row-major") {
    throw Error(ErrorCode::kMalformedHeader, "only row-major order is supported");
  }
  const TensorKind kind = parse_tensor_kind(header["kind"].get<std::string>());
  const auto& shape = header["shape"];
  const std::size_t dims = kind == TensorKind::kClassifierSoftmax ? 3 : 2;
  if (shape.size() != dims) {
    throw Error(ErrorCode::kMalformedHeader,
                "shape must have " + std::to_string(dims) + " entries for " +
                    std::string(to_string(kind)));
  }
  const std::size_t n = shape_value(shape[0]);
  const std::size_t t = shape_value(shape[1]);
  const std::size_t c = dims == 3 ? shape_value(shape[2]) : 1;

  auto payload = bytes.subspan(kPrefixBytes + header_len);
  if (payload.size() != 4 * n * t * c) {
    throw Error(ErrorCode::kPayloadLengthMismatch,
                "payload length mismatch: expected " + std::to_string(4 * n * t * c) +
                    " bytes, found " + std::to_string(payload.size()));
  }
  std::vector<float> values(n * t * c);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(get_u32_le(payload.subspan(4 * i, 4)));
  }
  SampleTensor tensor = SampleTensor::from_raw(kind, n, t, dims == 3 ? c : 0,
                                               std::move(values));
  tensor.validate(options);
  return tensor;
}

SampleTensor read_tensor(const std::filesystem::path& path,
                         const ValidationOptions& options) {
  return decode_tensor(read_binary_file(path), options);
}

void write_tensor(const SampleTensor& tensor, const std::filesystem::path& path) {
  tensor.validate_strict();
  write_file_atomic(path, encode_tensor(tensor));
}

}  // namespace uqsup
