#include "uqsup/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uqsup/error.hpp"

namespace uqsup {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw Error(ErrorCode::kLengthMismatch, std::string(what) + " differ in length");
}

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

ClassCounts require_both_classes(std::span<const double> uncertainties,
                                 const std::vector<bool>& malicious) {
  require_same_length(uncertainties.size(), malicious.size(), "uncertainties and labels");
  ClassCounts counts;
  for (bool m : malicious) (m ? counts.positives : counts.negatives) += 1;
  if (counts.positives == 0 || counts.negatives == 0) {
    throw Error(ErrorCode::kSingleClass, "need at least one malicious and one benign input");
  }
  return counts;
}

double per_input_score(const Assessment& a, double truth, Objective objective) {
  if (objective == Objective::kAccuracy) return a.predicted == truth ? 1.0 : 0.0;
  const double e = a.predicted - truth;
  return e * e;
}

}  // namespace

std::string_view to_string(Objective o) {
  return o == Objective::kAccuracy ? "accuracy" : "mse";
}

Objective parse_objective(std::string_view text) {
  if (text == "accuracy") return Objective::kAccuracy;
  if (text == "mse") return Objective::kMse;
  throw Error(ErrorCode::kInvalidArgument, "objective must be 'accuracy' or 'mse'");
}

Direction direction_of(Objective o) {
  return o == Objective::kAccuracy ? Direction::kHigherBetter : Direction::kLowerBetter;
}

ObjectiveBounds accuracy_bounds() { return {0.0, 1.0, Direction::kHigherBetter}; }

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "percentile of an empty set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ObjectiveBounds estimate_bounds(std::span<const double> per_input_errors, Direction direction) {
  ObjectiveBounds bounds{percentile(per_input_errors, 1.0), percentile(per_input_errors, 99.0),
                         direction};
  if (!(bounds.lower < bounds.upper)) {
    throw Error(ErrorCode::kDegenerateBounds, "estimated objective bounds are degenerate");
  }
  return bounds;
}

double objective(const AssessmentSet& assessments, const LabelVector& labels,
                 Objective objective) {
  require_same_length(assessments.size(), labels.size(), "assessments and labels");
  if (assessments.size() == 0) throw Error(ErrorCode::kEmptyInput, "objective of no inputs");
  double total = 0.0;
  for (std::size_t i = 0; i < assessments.size(); ++i) {
    total += per_input_score(assessments.items[i], labels.value(i), objective);
  }
  return total / static_cast<double>(assessments.size());
}

std::optional<double> supervised_objective(std::span<const SupervisionDecision> decisions,
                                           const AssessmentSet& assessments,
                                           const LabelVector& labels, Objective objective) {
  require_same_length(decisions.size(), assessments.size(), "decisions and assessments");
  require_same_length(assessments.size(), labels.size(), "assessments and labels");
  double total = 0.0;
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (!decisions[i].accepted) continue;
    total += per_input_score(assessments.items[i], labels.value(i), objective);
    ++accepted;
  }
  if (accepted == 0) return std::nullopt;
  return total / static_cast<double>(accepted);
}

double acceptance_rate(std::span<const SupervisionDecision> decisions) {
  if (decisions.empty()) throw Error(ErrorCode::kEmptyInput, "acceptance rate of no inputs");
  return static_cast<double>(accepted_count(decisions)) / static_cast<double>(decisions.size());
}

NormalizedObjective normalize_objective(double objective_value, const ObjectiveBounds& bounds) {
  if (!(bounds.lower < bounds.upper)) {
    throw Error(ErrorCode::kDegenerateBounds, "objective bounds need lower < upper");
  }
  double n = bounds.direction == Direction::kHigherBetter
                 ? (objective_value - bounds.lower) / (bounds.upper - bounds.lower)
                 : (bounds.upper - objective_value) / (bounds.upper - bounds.lower);
  NormalizedObjective out{std::clamp(n, 0.0, 1.0), false};
  out.clipped = out.value != n;
  return out;
}

double s_score(double supervised_objective, double delta, const ObjectiveBounds& bounds,
               double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::kInvalidBeta, "beta must be a finite value > 0");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "acceptance rate must lie in [0,1]");
  }
  const double n = normalize_objective(supervised_objective, bounds).value;
  if (n == 0.0 || delta == 0.0) return 0.0;
  const double b2 = beta * beta;
  return (1.0 + b2) * n * delta / (b2 * n + delta);
}

BinaryMetrics binary_metrics(std::span<const SupervisionDecision> decisions,
                             const std::vector<bool>& malicious) {
  require_same_length(decisions.size(), malicious.size(), "decisions and labels");
  BinaryMetrics m;
  auto& c = m.counts;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const bool rejected = !decisions[i].accepted;
    if (malicious[i]) {
      (rejected ? c.true_positive : c.false_negative) += 1;
    } else {
      (rejected ? c.false_positive : c.true_negative) += 1;
    }
  }
  const auto ratio = [](std::size_t num, std::size_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
  };
  const std::size_t positives = c.true_positive + c.false_negative;
  const std::size_t negatives = c.false_positive + c.true_negative;
  if (positives > 0) {
    m.tpr = ratio(c.true_positive, positives);
    m.fnr = ratio(c.false_negative, positives);
  }
  if (negatives > 0) {
    m.fpr = ratio(c.false_positive, negatives);
    m.tnr = ratio(c.true_negative, negatives);
  }
  const std::size_t f1_den = 2 * c.true_positive + c.false_positive + c.false_negative;
  m.f1 = c.true_positive == 0 ? 0.0 : ratio(2 * c.true_positive, f1_den);
  if (!decisions.empty()) {
    m.accuracy = ratio(c.true_positive + c.true_negative, decisions.size());
  }
  return m;
}

double average_precision(std::span<const double> uncertainties,
                         const std::vector<bool>& malicious) {
  const ClassCounts counts = require_both_classes(uncertainties, malicious);
  std::vector<std::size_t> order(uncertainties.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return uncertainties[a] > uncertainties[b]; });

  const double positives = static_cast<double>(counts.positives);
  std::size_t tp = 0;
  std::size_t fp = 0;
  double previous_recall = 0.0;
  double ap = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double value = uncertainties[order[i]];
    for (; i < order.size() && uncertainties[order[i]] == value; ++i) {
      (malicious[order[i]] ? tp : fp) += 1;
    }
    const double recall = static_cast<double>(tp) / positives;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - previous_recall) * precision;
    previous_recall = recall;
  }
  return ap;
}

double auroc(std::span<const double> uncertainties, const std::vector<bool>& malicious) {
  const ClassCounts counts = require_both_classes(uncertainties, malicious);
  std::vector<std::size_t> order(uncertainties.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return uncertainties[a] < uncertainties[b]; });

  // Twice the sum of (1-based, tie-averaged) ranks of the malicious inputs,
  // kept in integers so the statistic is exact.
  unsigned long long twice_rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && uncertainties[order[j]] == uncertainties[order[i]]) ++j;
    const unsigned long long twice_rank = (i + 1) + j;  // first + last rank
    for (std::size_t k = i; k < j; ++k) {
      if (malicious[order[k]]) twice_rank_sum += twice_rank;
    }
    i = j;
  }
  const unsigned long long p = counts.positives;
  const unsigned long long twice_u = twice_rank_sum - p * (p + 1);
  return static_cast<double>(twice_u) / static_cast<double>(2 * p * counts.negatives);
}

double point_biserial(std::span<const double> uncertainties, std::span<const double> errors) {
  require_same_length(uncertainties.size(), errors.size(), "uncertainties and errors");
  const std::size_t n = uncertainties.size();
  if (n < 2) throw Error(ErrorCode::kZeroVariance, "zero variance");
  const double mu = std::accumulate(uncertainties.begin(), uncertainties.end(), 0.0) /
                    static_cast<double>(n);
  const double me = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(n);
  double suu = 0.0;
  double see = 0.0;
  double sue = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double du = uncertainties[i] - mu;
    const double de = errors[i] - me;
    suu += du * du;
    see += de * de;
    sue += du * de;
  }
  if (suu == 0.0 || see == 0.0) throw Error(ErrorCode::kZeroVariance, "zero variance");
  return std::clamp(sue / std::sqrt(suu * see), -1.0, 1.0);
}

double point_biserial(std::span<const double> uncertainties, const std::vector<bool>& errors) {
  std::vector<double> numeric(errors.begin(), errors.end());
  return point_biserial(uncertainties, numeric);
}

std::optional<double> EvaluationReport::s_score(double beta) const {
  for (const auto& s : s_scores) {
    if (s.beta == beta) return s.value;
  }
  return std::nullopt;
}

EvaluationReport evaluate(const AssessmentSet& assessments, const LabelVector& labels,
                          const SupervisorThreshold& threshold,
                          const EvaluationOptions& options) {
  const auto decisions = supervise(assessments, threshold);
  const auto malicious = label_malicious(assessments, labels, options.acceptable_imprecision);
  const auto uncertainties = assessments.uncertainties();

  EvaluationReport report;
  report.objective = options.objective;
  report.unsupervised_objective = objective(assessments, labels, options.objective);
  report.supervised_objective =
      supervised_objective(decisions, assessments, labels, options.objective);
  report.acceptance_rate = acceptance_rate(decisions);
  report.accepted = accepted_count(decisions);
  report.rejected = decisions.size() - report.accepted;
  report.malicious = static_cast<std::size_t>(std::count(malicious.begin(), malicious.end(), true));
  report.benign = malicious.size() - report.malicious;

  for (double beta : options.betas) {
    double value = 0.0;
    if (report.supervised_objective) {
      value = s_score(*report.supervised_objective, report.acceptance_rate, options.bounds, beta);
      report.normalized_objective_clipped =
          normalize_objective(*report.supervised_objective, options.bounds).clipped;
    } else if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw Error(ErrorCode::kInvalidBeta, "beta must be a finite value > 0");
    }
    report.s_scores.push_back({beta, value});
  }

  report.binary = binary_metrics(decisions, malicious);
  if (report.malicious > 0 && report.benign > 0) {
    report.threshold_free.avgpr = average_precision(uncertainties, malicious);
    report.threshold_free.auroc = auroc(uncertainties, malicious);
  }
  try {
    if (labels.kind == TensorKind::kClassifierSoftmax) {
      report.threshold_free.point_biserial = point_biserial(uncertainties, malicious);
    } else {
      std::vector<double> errors(assessments.size());
      for (std::size_t i = 0; i < errors.size(); ++i) {
        errors[i] = per_input_score(assessments.items[i], labels.targets[i], Objective::kMse);
      }
      report.threshold_free.point_biserial = point_biserial(uncertainties, errors);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kZeroVariance) throw;
  }
  return report;
}

}  // namespace uqsup
