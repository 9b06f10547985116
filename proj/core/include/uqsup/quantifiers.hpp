#pragma once

// Uncertainty quantifiers. Every quantifier reports an uncertainty where
// larger means "more likely wrong"; confidence-style quantifiers (SM, PCS, MS)
// store uncertainty = -confidence so a single "reject iff u >= t" rule holds.
//
// Entropies use the natural log with 0 * ln 0 = 0. Argmax and mode ties go to
// the lowest class index. All accumulation is f64 in fixed index order.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uqsup/tensor_io.hpp"

namespace uqsup {

enum class Quantifier {
  kMaxSoftmax,          // sm
  kPcs,                 // pcs
  kSoftmaxEntropy,      // sme
  kMeanSoftmax,         // ms
  kVariationRatio,      // vr
  kPredictiveEntropy,   // pe
  kMutualInformation,   // mi
  kPredictiveVariance,  // pred-var
  kMeanVariance,        // mean-var
};

std::string_view to_string(Quantifier q);
Quantifier parse_quantifier(std::string_view text);

// SM, PCS and SME look at a single softmax row.
bool is_point_quantifier(Quantifier q);
bool is_regression_quantifier(Quantifier q);
bool is_confidence_quantifier(Quantifier q);

struct Assessment {
  // Class index (classifier) or real prediction (regression).
  double predicted = 0.0;
  double uncertainty = 0.0;
};

struct AssessmentSet {
  Quantifier quantifier = Quantifier::kMaxSoftmax;
  std::vector<Assessment> items;

  std::size_t size() const noexcept { return items.size(); }
  std::vector<double> uncertainties() const;
  std::vector<double> predictions() const;
};

struct QuantifierSpec {
  Quantifier quantifier = Quantifier::kMaxSoftmax;
  // Use only the first k of T samples; defaults to all of them (or 1 for
  // point quantifiers).
  std::optional<std::size_t> sample_prefix;
};

// Point quantifiers: require T = 1, or sample_prefix = 1 to read the first
// sample of a sampled tensor.
AssessmentSet max_softmax(const SampleTensor& tensor,
                          std::optional<std::size_t> k = std::nullopt);
AssessmentSet pcs(const SampleTensor& tensor, std::optional<std::size_t> k = std::nullopt);
AssessmentSet softmax_entropy(const SampleTensor& tensor,
                              std::optional<std::size_t> k = std::nullopt);

// Sampling quantifiers: 2 <= k <= T.
AssessmentSet mean_softmax(const SampleTensor& tensor,
                           std::optional<std::size_t> k = std::nullopt);
AssessmentSet variation_ratio(const SampleTensor& tensor,
                              std::optional<std::size_t> k = std::nullopt);
AssessmentSet predictive_entropy(const SampleTensor& tensor,
                                 std::optional<std::size_t> k = std::nullopt);
AssessmentSet mutual_information(const SampleTensor& tensor,
                                 std::optional<std::size_t> k = std::nullopt);
AssessmentSet predictive_variance(const SampleTensor& tensor,
                                  std::optional<std::size_t> k = std::nullopt);
// Ensemble members with a variance head: means and variances are aligned
// N x T regression tensors.
AssessmentSet mean_variance(const SampleTensor& means, const SampleTensor& variances,
                            std::optional<std::size_t> k = std::nullopt);

// Dispatches on spec.quantifier. mean-var needs the variance tensor.
AssessmentSet quantify(const SampleTensor& tensor, const QuantifierSpec& spec,
                       const SampleTensor* variances = nullptr);

// Row-level helpers shared with the analyses and tests.
std::size_t argmax(std::span<const double> row);
double entropy(std::span<const double> probabilities);

}  // namespace uqsup
