#pragma once

// Individual and joint assessment metrics for a model plus supervisor.
//
// The supervisor's positive class is "malicious" (should be rejected); a
// rejection is a positive prediction. Undefined quantities are reported as
// std::nullopt rather than NaN.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uqsup/labels.hpp"
#include "uqsup/quantifiers.hpp"
#include "uqsup/supervisor.hpp"

namespace uqsup {

enum class Objective { kAccuracy, kMse };
enum class Direction { kHigherBetter, kLowerBetter };

std::string_view to_string(Objective o);
Objective parse_objective(std::string_view text);
Direction direction_of(Objective o);

struct ObjectiveBounds {
  double lower = 0.0;
  double upper = 1.0;
  Direction direction = Direction::kHigherBetter;
};

// Accuracy is bounded by [0, 1] by definition.
ObjectiveBounds accuracy_bounds();

// [p1, p99] of per-input errors (linear interpolation between order
// statistics), for unbounded objectives such as MSE.
ObjectiveBounds estimate_bounds(std::span<const double> per_input_errors,
                                Direction direction = Direction::kLowerBetter);
double percentile(std::span<const double> values, double q);

// Objective over all inputs.
double objective(const AssessmentSet& assessments, const LabelVector& labels,
                 Objective objective);
// Objective over accepted inputs only; nullopt when nothing is accepted.
std::optional<double> supervised_objective(std::span<const SupervisionDecision> decisions,
                                           const AssessmentSet& assessments,
                                           const LabelVector& labels, Objective objective);

double acceptance_rate(std::span<const SupervisionDecision> decisions);

struct NormalizedObjective {
  double value = 0.0;
  bool clipped = false;
};
NormalizedObjective normalize_objective(double objective_value, const ObjectiveBounds& bounds);

// Weighted harmonic mean of the normalized supervised objective and the
// acceptance rate: (1 + b^2) n d / (b^2 n + d), and 0 when n or d is 0.
double s_score(double supervised_objective, double delta, const ObjectiveBounds& bounds,
               double beta);

struct ConfusionCounts {
  std::size_t true_positive = 0;   // rejected malicious
  std::size_t false_positive = 0;  // rejected benign
  std::size_t true_negative = 0;   // accepted benign
  std::size_t false_negative = 0;  // accepted malicious
};

struct BinaryMetrics {
  ConfusionCounts counts;
  std::optional<double> tpr;  // undefined without malicious inputs
  std::optional<double> fpr;  // undefined without benign inputs
  std::optional<double> tnr;
  std::optional<double> fnr;
  double f1 = 0.0;  // 0 when precision + recall = 0
  double accuracy = 0.0;
};

BinaryMetrics binary_metrics(std::span<const SupervisionDecision> decisions,
                             const std::vector<bool>& malicious);

// Step-wise average precision over descending distinct uncertainty values,
// ties handled as one block.
double average_precision(std::span<const double> uncertainties,
                         const std::vector<bool>& malicious);
// Mann-Whitney: P(u_malicious > u_benign) + P(equal) / 2.
double auroc(std::span<const double> uncertainties, const std::vector<bool>& malicious);
// Pearson correlation; with a 0/1 error variable this is the point-biserial r.
double point_biserial(std::span<const double> uncertainties, std::span<const double> errors);
double point_biserial(std::span<const double> uncertainties, const std::vector<bool>& errors);

struct ThresholdFreeMetrics {
  std::optional<double> avgpr;
  std::optional<double> auroc;
  std::optional<double> point_biserial;
};

struct SScore {
  double beta = 1.0;
  double value = 0.0;
};

struct EvaluationReport {
  Objective objective = Objective::kAccuracy;
  double unsupervised_objective = 0.0;
  std::optional<double> supervised_objective;
  double acceptance_rate = 0.0;
  std::vector<SScore> s_scores;
  bool normalized_objective_clipped = false;
  BinaryMetrics binary;
  ThresholdFreeMetrics threshold_free;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t benign = 0;
  std::size_t malicious = 0;

  std::optional<double> s_score(double beta) const;
};

struct EvaluationOptions {
  Objective objective = Objective::kAccuracy;
  ObjectiveBounds bounds = accuracy_bounds();
  std::vector<double> betas = {1.0};
  // Required for regression.
  std::optional<double> acceptable_imprecision;
};

EvaluationReport evaluate(const AssessmentSet& assessments, const LabelVector& labels,
                          const SupervisorThreshold& threshold,
                          const EvaluationOptions& options = {});

}  // namespace uqsup
