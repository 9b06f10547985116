#include "uqsup/labels.hpp"

#include "uqsup/error.hpp"
#include "uqsup/text_io.hpp"

namespace uqsup {

LabelVector parse_labels(std::string_view text, TensorKind kind,
                         std::optional<std::size_t> class_count) {
  auto lines = split_lines(text);
  if (lines.empty() || lines.front() != "index,label") {
    throw Error(ErrorCode::kMissingLabelHeader, "labels CSV must start with 'index,label'");
  }
  LabelVector labels;
  labels.kind = kind;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    auto fields = split(lines[row], ',');
    if (fields.size() != 2) {
      throw Error(ErrorCode::kMalformedLabelRow,
                  "line " + std::to_string(row + 1) + ": expected 'index,label'");
    }
    long long index = 0;
    try {
      index = parse_integer(fields[0]);
    } catch (const Error&) {
      throw Error(ErrorCode::kMalformedLabelRow,
                  "line " + std::to_string(row + 1) + ": bad index");
    }
    const auto expected = static_cast<long long>(row - 1);
    if (index < expected) {
      throw Error(ErrorCode::kDuplicateIndex, "duplicate index " + std::to_string(index));
    }
    if (index > expected) {
      throw Error(ErrorCode::kNonContiguousIndex,
                  "non-contiguous index " + std::to_string(index));
    }
    try {
      if (kind == TensorKind::kClassifierSoftmax) {
        long long cls = parse_integer(fields[1]);
        if (cls < 0 || (class_count && cls >= static_cast<long long>(*class_count))) {
          throw Error(ErrorCode::kClassOutOfRange,
                      "class out of range: " + std::to_string(cls) + " at index " +
                          std::to_string(index));
        }
        labels.classes.push_back(static_cast<std::int32_t>(cls));
      } else {
        labels.targets.push_back(parse_double(fields[1]));
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kClassOutOfRange) throw;
      throw Error(ErrorCode::kMalformedLabelRow,
                  "line " + std::to_string(row + 1) + ": bad label");
    }
  }
  return labels;
}

LabelVector read_labels(const std::filesystem::path& path, TensorKind kind,
                        std::optional<std::size_t> class_count) {
  return parse_labels(read_text_file(path), kind, class_count);
}

std::string format_labels(const LabelVector& labels) {
  std::string out = "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    if (labels.kind == TensorKind::kClassifierSoftmax) {
      out += std::to_string(labels.classes[i]);
    } else {
      out += format_number(labels.targets[i]);
    }
    out += '\n';
  }
  return out;
}

void write_labels(const LabelVector& labels, const std::filesystem::path& path) {
  write_file_atomic(path, format_labels(labels));
}

void check_aligned(const SampleTensor& tensor, const LabelVector& labels) {
  if (tensor.kind() != labels.kind) {
    throw Error(ErrorCode::kWrongTensorKind, "label kind does not match tensor kind");
  }
  if (labels.size() != tensor.inputs()) {
    throw Error(ErrorCode::kLengthMismatch,
                "labels have " + std::to_string(labels.size()) + " rows, tensor has " +
                    std::to_string(tensor.inputs()) + " inputs");
  }
  if (tensor.is_classifier()) {
    for (std::size_t i = 0; i < labels.classes.size(); ++i) {
      if (labels.classes[i] < 0 ||
          static_cast<std::size_t>(labels.classes[i]) >= tensor.classes()) {
        throw Error(ErrorCode::kClassOutOfRange,
                    "class out of range at index " + std::to_string(i));
      }
    }
  }
}

}  // namespace uqsup
