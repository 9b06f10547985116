#include "uqsup/error.hpp"

namespace uqsup {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kTruncatedHeader: return "truncated-header";
    case ErrorCode::kMalformedHeader: return "malformed-header";
    case ErrorCode::kPayloadLengthMismatch: return "payload-length-mismatch";
    case ErrorCode::kNonFiniteValue: return "non-finite-value";
    case ErrorCode::kSoftmaxEntryOutOfRange: return "softmax-entry-out-of-range";
    case ErrorCode::kSoftmaxRowSum: return "softmax-row-sum";
    case ErrorCode::kInvalidShape: return "invalid-shape";
    case ErrorCode::kMissingLabelHeader: return "missing-label-header";
    case ErrorCode::kMalformedLabelRow: return "malformed-label-row";
    case ErrorCode::kNonContiguousIndex: return "non-contiguous-index";
    case ErrorCode::kDuplicateIndex: return "duplicate-index";
    case ErrorCode::kClassOutOfRange: return "class-out-of-range";
    case ErrorCode::kLengthMismatch: return "length-mismatch";
    case ErrorCode::kMalformedManifest: return "malformed-manifest";
    case ErrorCode::kWrongTensorKind: return "wrong-tensor-kind";
    case ErrorCode::kInvalidSamplePrefix: return "invalid-sample-prefix";
    case ErrorCode::kNegativeVariance: return "negative-variance";
    case ErrorCode::kMissingImprecisionBound: return "missing-imprecision-bound";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kEpsilonOutOfRange: return "epsilon-out-of-range";
    case ErrorCode::kQuantifierMismatch: return "quantifier-mismatch";
    case ErrorCode::kSingleClass: return "single-class";
    case ErrorCode::kZeroVariance: return "zero-variance";
    case ErrorCode::kInvalidBeta: return "invalid-beta";
    case ErrorCode::kDegenerateBounds: return "degenerate-bounds";
    case ErrorCode::kMissingCompetitor: return "missing-competitor";
    case ErrorCode::kDuplicateEntry: return "duplicate-entry";
    case ErrorCode::kGridTooSmall: return "grid-too-small";
    case ErrorCode::kMissingCell: return "missing-cell";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInstanceTooLarge: return "instance-too-large";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace uqsup
