#pragma once

// Supervisor: an input is accepted iff its uncertainty is strictly below the
// threshold t. Misclassified (or too-imprecise) inputs are "malicious" and
// form the positive class; the rest are "benign".

#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uqsup/labels.hpp"
#include "uqsup/quantifiers.hpp"

namespace uqsup {

enum class BenignDefinition { kCorrectOnly, kAllNominal };

std::string_view to_string(BenignDefinition d);
BenignDefinition parse_benign_definition(std::string_view text);

enum class CalibrationMode {
  // Smallest realized FPR that is still >= epsilon (the largest such t).
  kMinimalAbove,
  // Realized FPR closest to epsilon; ties prefer the candidate >= epsilon.
  kClosest,
};

struct CalibrationResult {
  double threshold = std::numeric_limits<double>::infinity();
  double realized_fpr = 0.0;
  std::size_t calibration_size = 0;
  // Set when n < 1/epsilon: the empirical FPR moves in steps of 1/n, too
  // coarse to resolve epsilon.
  bool coarse_granularity = false;
};

struct SupervisorThreshold {
  Quantifier quantifier = Quantifier::kMaxSoftmax;
  double t = std::numeric_limits<double>::infinity();
  double epsilon = 0.0;
  double realized_fpr = 0.0;
  std::size_t calibration_size = 0;
  BenignDefinition benign_definition = BenignDefinition::kCorrectOnly;
};

struct SupervisionDecision {
  bool accepted = true;
  double uncertainty = 0.0;
};

// Classifier: malicious iff predicted != label. Regression: malicious iff
// |predicted - target| > acceptable_imprecision (required).
std::vector<bool> label_malicious(const AssessmentSet& assessments, const LabelVector& labels,
                                  std::optional<double> acceptable_imprecision = std::nullopt);

// Empirical FPR of benign uncertainties at threshold t: share with u >= t.
double false_positive_rate(std::span<const double> benign_uncertainties, double t);

// Candidate thresholds are the distinct observed values plus +inf.
CalibrationResult calibrate_threshold(std::span<const double> benign_uncertainties,
                                      double epsilon,
                                      CalibrationMode mode = CalibrationMode::kMinimalAbove);

// Selects the calibration set according to the benign definition (all inputs
// for kAllNominal, correctly predicted ones for kCorrectOnly) and calibrates.
SupervisorThreshold calibrate_supervisor(const AssessmentSet& validation,
                                         const std::vector<bool>& malicious, double epsilon,
                                         BenignDefinition definition,
                                         CalibrationMode mode = CalibrationMode::kMinimalAbove);

std::vector<SupervisionDecision> supervise(const AssessmentSet& assessments,
                                           const SupervisorThreshold& threshold);
std::size_t accepted_count(std::span<const SupervisionDecision> decisions);

// {quantifier, t, epsilon, realized_fpr, calibration_size, benign_definition};
// an infinite t is written as the string "inf".
std::string format_threshold(const SupervisorThreshold& threshold);
SupervisorThreshold parse_threshold(std::string_view json);
SupervisorThreshold read_threshold(const std::filesystem::path& path);
void write_threshold(const SupervisorThreshold& threshold, const std::filesystem::path& path);

}  // namespace uqsup
