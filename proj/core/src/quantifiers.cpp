#include "uqsup/quantifiers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "uqsup/error.hpp"
#include "uqsup/parallel.hpp"

namespace uqsup {
namespace {

void require_classifier(const SampleTensor& tensor, Quantifier q) {
  if (!tensor.is_classifier()) {
    throw Error(ErrorCode::kWrongTensorKind,
                std::string(to_string(q)) + " needs a classifier-softmax tensor");
  }
}

void require_regression(const SampleTensor& tensor, Quantifier q) {
  if (tensor.is_classifier()) {
    throw Error(ErrorCode::kWrongTensorKind,
                std::string(to_string(q)) + " needs a regression tensor");
  }
}

// Point quantifiers read sample 0; a sampled tensor is accepted only when the
// caller explicitly asks for the 1-sample prefix.
void require_point(const SampleTensor& tensor, Quantifier q, std::optional<std::size_t> k) {
  require_classifier(tensor, q);
  if (k ? *k != 1 : tensor.samples() != 1) {
    throw Error(ErrorCode::kInvalidSamplePrefix,
                std::string(to_string(q)) + " uses exactly one sample (T = 1 or k = 1)");
  }
}

std::size_t resolve_prefix(const SampleTensor& tensor, Quantifier q,
                           std::optional<std::size_t> k) {
  const std::size_t prefix = k.value_or(tensor.samples());
  if (prefix > tensor.samples()) {
    throw Error(ErrorCode::kInvalidSamplePrefix,
                "sample prefix k=" + std::to_string(prefix) + " exceeds T=" +
                    std::to_string(tensor.samples()));
  }
  if (prefix < 2) {
    throw Error(ErrorCode::kInvalidSamplePrefix,
                std::string(to_string(q)) + " needs at least 2 samples");
  }
  return prefix;
}

// Builds one Assessment per input in parallel; fn(input) must be pure.
template <typename Fn>
AssessmentSet per_input(Quantifier q, std::size_t inputs, Fn&& fn) {
  AssessmentSet out;
  out.quantifier = q;
  out.items.resize(inputs);
  parallel_for(inputs, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out.items[i] = fn(i);
  });
  return out;
}

std::vector<double> widen(std::span<const float> row) {
  return std::vector<double>(row.begin(), row.end());
}

std::size_t argmax_f32(std::span<const float> row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

// Sum over the first k sample rows of an input, per class.
std::vector<double> class_sums(const SampleTensor& tensor, std::size_t input,
                               std::size_t k) {
  std::vector<double> sums(tensor.classes(), 0.0);
  for (std::size_t t = 0; t < k; ++t) {
    auto row = tensor.row(input, t);
    for (std::size_t c = 0; c < sums.size(); ++c) sums[c] += row[c];
  }
  return sums;
}

// Entropy of the row rescaled to sum 1; stored f32 rows may drift by up to
// the validation tolerance.
double normalized_entropy(std::vector<double> row) {
  double total = 0.0;
  for (double p : row) total += p;
  if (total > 0.0) {
    for (double& p : row) p /= total;
  }
  return entropy(row);
}

}  // namespace

std::string_view to_string(Quantifier q) {
  switch (q) {
    case Quantifier::kMaxSoftmax: return "sm";
    case Quantifier::kPcs: return "pcs";
    case Quantifier::kSoftmaxEntropy: return "sme";
    case Quantifier::kMeanSoftmax: return "ms";
    case Quantifier::kVariationRatio: return "vr";
    case Quantifier::kPredictiveEntropy: return "pe";
    case Quantifier::kMutualInformation: return "mi";
    case Quantifier::kPredictiveVariance: return "pred-var";
    case Quantifier::kMeanVariance: return "mean-var";
  }
  return "?";
}

Quantifier parse_quantifier(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (auto q : {Quantifier::kMaxSoftmax, Quantifier::kPcs, Quantifier::kSoftmaxEntropy,
                 Quantifier::kMeanSoftmax, Quantifier::kVariationRatio,
                 Quantifier::kPredictiveEntropy, Quantifier::kMutualInformation,
                 Quantifier::kPredictiveVariance, Quantifier::kMeanVariance}) {
    if (lower == to_string(q)) return q;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown quantifier '" + std::string(text) + "'");
}

bool is_point_quantifier(Quantifier q) {
  return q == Quantifier::kMaxSoftmax || q == Quantifier::kPcs ||
         q == Quantifier::kSoftmaxEntropy;
}

bool is_regression_quantifier(Quantifier q) {
  return q == Quantifier::kPredictiveVariance || q == Quantifier::kMeanVariance;
}

bool is_confidence_quantifier(Quantifier q) {
  return q == Quantifier::kMaxSoftmax || q == Quantifier::kPcs ||
         q == Quantifier::kMeanSoftmax;
}

std::vector<double> AssessmentSet::uncertainties() const {
  std::vector<double> out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) out[i] = items[i].uncertainty;
  return out;
}

std::vector<double> AssessmentSet::predictions() const {
  std::vector<double> out(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) out[i] = items[i].predicted;
  return out;
}

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

double entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

AssessmentSet max_softmax(const SampleTensor& tensor, std::optional<std::size_t> k) {
  require_point(tensor, Quantifier::kMaxSoftmax, k);
  return per_input(Quantifier::kMaxSoftmax, tensor.inputs(), [&](std::size_t i) {
    auto row = tensor.row(i, 0);
    std::size_t top = argmax_f32(row);
    return Assessment{static_cast<double>(top), -static_cast<double>(row[top])};
  });
}

AssessmentSet pcs(const SampleTensor& tensor, std::optional<std::size_t> k) {
  require_point(tensor, Quantifier::kPcs, k);
  return per_input(Quantifier::kPcs, tensor.inputs(), [&](std::size_t i) {
    auto row = tensor.row(i, 0);
    std::size_t top = argmax_f32(row);
    double second = -1.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c != top) second = std::max(second, static_cast<double>(row[c]));
    }
    double confidence = static_cast<double>(row[top]) - second;
    return Assessment{static_cast<double>(top), -confidence};
  });
}

AssessmentSet softmax_entropy(const SampleTensor& tensor, std::optional<std::size_t> k) {
  require_point(tensor, Quantifier::kSoftmaxEntropy, k);
  return per_input(Quantifier::kSoftmaxEntropy, tensor.inputs(), [&](std::size_t i) {
    auto row = widen(tensor.row(i, 0));
    return Assessment{static_cast<double>(argmax(row)), normalized_entropy(row)};
  });
}

AssessmentSet mean_softmax(const SampleTensor& tensor, std::optional<std::size_t> k) {
  require_classifier(tensor, Quantifier::kMeanSoftmax);
  const std::size_t prefix = resolve_prefix(tensor, Quantifier::kMeanSoftmax, k);
  return per_input(Quantifier::kMeanSoftmax, tensor.inputs(), [&](std::size_t i) {
    auto sums = class_sums(tensor, i, prefix);
    std::size_t chosen = argmax(sums);
    double confidence = sums[chosen] / static_cast<double>(prefix);
    return Assessment{static_cast<double>(chosen), -confidence};
  });
}

AssessmentSet variation_ratio(const SampleTensor& tensor, std::optional<std::size_t> k) {
  require_classifier(tensor, Quantifier::kVariationRatio);
  const std::size_t prefix = resolve_prefix(tensor, Quantifier::kVariationRatio, k);
  return per_input(Quantifier::kVariationRatio, tensor.inputs(), [&](std::size_t i) {
    std::vector<std::size_t> votes(tensor.classes(), 0);
    for (std::size_t t = 0; t < prefix; ++t) ++votes[argmax_f32(tensor.row(i, t))];
    // Mode of per-sample argmaxes; ties to the lowest class index.
    std::size_t mode = 0;
    for (std::size_t c = 1; c < votes.size(); ++c) {
      if (votes[c] > votes[mode]) mode = c;
    }
    double ratio = static_cast<double>(prefix - votes[mode]) / static_cast<double>(prefix);
    return Assessment{static_cast<double>(mode), ratio};
  });
}

AssessmentSet predictive_entropy(const SampleTensor& tensor, std::optional<std::size_t> k) {
  require_classifier(tensor, Quantifier::kPredictiveEntropy);
  const std::size_t prefix = resolve_prefix(tensor, Quantifier::kPredictiveEntropy, k);
  return per_input(Quantifier::kPredictiveEntropy, tensor.inputs(), [&](std::size_t i) {
    auto mean = class_sums(tensor, i, prefix);
    for (double& p : mean) p /= static_cast<double>(prefix);
    return Assessment{static_cast<double>(argmax(mean)), normalized_entropy(mean)};
  });
}

AssessmentSet mutual_information(const SampleTensor& tensor, std::optional<std::size_t> k) {
  require_classifier(tensor, Quantifier::kMutualInformation);
  const std::size_t prefix = resolve_prefix(tensor, Quantifier::kMutualInformation, k);
  return per_input(Quantifier::kMutualInformation, tensor.inputs(), [&](std::size_t i) {
    auto mean = class_sums(tensor, i, prefix);
    for (double& p : mean) p /= static_cast<double>(prefix);
    double expected_entropy = 0.0;
    for (std::size_t t = 0; t < prefix; ++t) {
      expected_entropy += normalized_entropy(widen(tensor.row(i, t)));
    }
    expected_entropy /= static_cast<double>(prefix);
    // Non-negative by concavity; clamp the rounding residue.
    double mi = std::max(0.0, normalized_entropy(mean) - expected_entropy);
    return Assessment{static_cast<double>(argmax(mean)), mi};
  });
}

AssessmentSet predictive_variance(const SampleTensor& tensor, std::optional<std::size_t> k) {
  require_regression(tensor, Quantifier::kPredictiveVariance);
  const std::size_t prefix = resolve_prefix(tensor, Quantifier::kPredictiveVariance, k);
  return per_input(Quantifier::kPredictiveVariance, tensor.inputs(), [&](std::size_t i) {
    auto block = tensor.input_block(i).first(prefix);
    double mean = 0.0;
    for (float v : block) mean += v;
    mean /= static_cast<double>(prefix);
    double ss = 0.0;
    for (float v : block) ss += (v - mean) * (v - mean);
    return Assessment{mean, ss / static_cast<double>(prefix - 1)};
  });
}

AssessmentSet mean_variance(const SampleTensor& means, const SampleTensor& variances,
                            std::optional<std::size_t> k) {
  require_regression(means, Quantifier::kMeanVariance);
  require_regression(variances, Quantifier::kMeanVariance);
  if (means.inputs() != variances.inputs() || means.samples() != variances.samples()) {
    throw Error(ErrorCode::kLengthMismatch, "mean and variance tensors differ in shape");
  }
  for (float v : variances.values()) {
    if (v < 0.0f) throw Error(ErrorCode::kNegativeVariance, "negative variance entry");
  }
  const std::size_t prefix = resolve_prefix(means, Quantifier::kMeanVariance, k);
  return per_input(Quantifier::kMeanVariance, means.inputs(), [&](std::size_t i) {
    auto mu = means.input_block(i).first(prefix);
    auto var = variances.input_block(i).first(prefix);
    double mean = 0.0;
    double avg_var = 0.0;
    for (std::size_t t = 0; t < prefix; ++t) {
      mean += mu[t];
      avg_var += var[t];
    }
    return Assessment{mean / static_cast<double>(prefix),
                      avg_var / static_cast<double>(prefix)};
  });
}

AssessmentSet quantify(const SampleTensor& tensor, const QuantifierSpec& spec,
                       const SampleTensor* variances) {
  const auto k = spec.sample_prefix;
  switch (spec.quantifier) {
    case Quantifier::kMaxSoftmax: return max_softmax(tensor, k);
    case Quantifier::kPcs: return pcs(tensor, k);
    case Quantifier::kSoftmaxEntropy: return softmax_entropy(tensor, k);
    case Quantifier::kMeanSoftmax: return mean_softmax(tensor, k);
    case Quantifier::kVariationRatio: return variation_ratio(tensor, k);
    case Quantifier::kPredictiveEntropy: return predictive_entropy(tensor, k);
    case Quantifier::kMutualInformation: return mutual_information(tensor, k);
    case Quantifier::kPredictiveVariance: return predictive_variance(tensor, k);
    case Quantifier::kMeanVariance:
      if (variances == nullptr) {
        throw Error(ErrorCode::kInvalidArgument, "mean-var needs a variance tensor");
      }
      return mean_variance(tensor, *variances, k);
  }
  throw Error(ErrorCode::kInvalidArgument, "unhandled quantifier");
}

}  // namespace uqsup
