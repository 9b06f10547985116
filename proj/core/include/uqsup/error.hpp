#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uqsup {

// Every malformed-input class maps to its own code so callers (and tests) can
// distinguish them without parsing messages.
enum class ErrorCode {
  // tensor container
  kBadMagic,
  kTruncatedHeader,
  kMalformedHeader,
  kPayloadLengthMismatch,
  kNonFiniteValue,
  kSoftmaxEntryOutOfRange,
  kSoftmaxRowSum,
  kInvalidShape,
  // labels
  kMissingLabelHeader,
  kMalformedLabelRow,
  kNonContiguousIndex,
  kDuplicateIndex,
  kClassOutOfRange,
  kLengthMismatch,
  // manifest
  kMalformedManifest,
  // quantifiers / supervisor / metrics
  kWrongTensorKind,
  kInvalidSamplePrefix,
  kNegativeVariance,
  kMissingImprecisionBound,
  kEmptyInput,
  kEpsilonOutOfRange,
  kQuantifierMismatch,
  kSingleClass,
  kZeroVariance,
  kInvalidBeta,
  kDegenerateBounds,
  // analysis
  kMissingCompetitor,
  kDuplicateEntry,
  kGridTooSmall,
  kMissingCell,
  kInvalidArgument,
  kInstanceTooLarge,
  // environment
  kIo,
};

std::string_view to_string(ErrorCode code);

// Raised for anything the caller can fix by changing inputs. Internal faults
// surface as other std::exception types.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace uqsup
