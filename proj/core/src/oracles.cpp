#include "uqsup/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uqsup/error.hpp"

namespace uqsup::oracle {
namespace {

void check_size(std::size_t n) {
  if (n > kMaxInstance) {
    throw Error(ErrorCode::kInstanceTooLarge,
                "oracle instances are limited to " + std::to_string(kMaxInstance) + " values");
  }
}

// Distinct values, descending.
std::vector<double> distinct_descending(std::span<const double> values) {
  std::vector<double> out;
  for (double v : values) {
    bool seen = false;
    for (double w : out) seen = seen || (w == v);
    if (!seen) out.push_back(v);
  }
  std::sort(out.begin(), out.end(), [](double a, double b) { return a > b; });
  return out;
}

}  // namespace

Metric parse_metric(std::string_view text) {
  if (text == "avgpr") return Metric::kAvgpr;
  if (text == "auroc") return Metric::kAuroc;
  if (text == "calibrate") return Metric::kCalibrate;
  if (text == "s-score") return Metric::kSScore;
  throw Error(ErrorCode::kInvalidArgument, "unknown oracle metric '" + std::string(text) + "'");
}

double average_precision(std::span<const double> uncertainties,
                         const std::vector<bool>& malicious) {
  check_size(uncertainties.size());
  std::size_t positives = 0;
  for (bool m : malicious) positives += m ? 1 : 0;
  if (positives == 0 || positives == malicious.size()) {
    throw Error(ErrorCode::kSingleClass, "need both classes");
  }
  double ap = 0.0;
  double previous_recall = 0.0;
  for (double t : distinct_descending(uncertainties)) {
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t i = 0; i < uncertainties.size(); ++i) {
      if (uncertainties[i] >= t) (malicious[i] ? tp : fp) += 1;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - previous_recall) * precision;
    previous_recall = recall;
  }
  return ap;
}

double auroc(std::span<const double> uncertainties, const std::vector<bool>& malicious) {
  check_size(uncertainties.size());
  unsigned long long greater = 0;
  unsigned long long equal = 0;
  unsigned long long positives = 0;
  unsigned long long negatives = 0;
  for (bool m : malicious) (m ? positives : negatives) += 1;
  if (positives == 0 || negatives == 0) throw Error(ErrorCode::kSingleClass, "need both classes");
  for (std::size_t i = 0; i < uncertainties.size(); ++i) {
    if (!malicious[i]) continue;
    for (std::size_t j = 0; j < uncertainties.size(); ++j) {
      if (malicious[j]) continue;
      if (uncertainties[i] > uncertainties[j]) ++greater;
      if (uncertainties[i] == uncertainties[j]) ++equal;
    }
  }
  return static_cast<double>(2 * greater + equal) /
         static_cast<double>(2 * positives * negatives);
}

CalibrationResult calibrate(std::span<const double> benign_uncertainties, double epsilon) {
  check_size(benign_uncertainties.size());
  if (benign_uncertainties.empty()) throw Error(ErrorCode::kEmptyInput, "empty benign set");
  std::vector<double> candidates = distinct_descending(benign_uncertainties);
  candidates.insert(candidates.begin(), std::numeric_limits<double>::infinity());

  CalibrationResult best;
  best.calibration_size = benign_uncertainties.size();
  best.coarse_granularity =
      static_cast<double>(benign_uncertainties.size()) * epsilon < 1.0;
  bool found = false;
  for (double t : candidates) {
    std::size_t rejected = 0;
    for (double u : benign_uncertainties) rejected += u >= t ? 1 : 0;
    const double fpr =
        static_cast<double>(rejected) / static_cast<double>(benign_uncertainties.size());
    if (fpr < epsilon) continue;
    const bool better = !found || fpr < best.realized_fpr ||
                        (fpr == best.realized_fpr && t > best.threshold);
    if (better) {
      best.threshold = t;
      best.realized_fpr = fpr;
      found = true;
    }
  }
  return best;
}

double s_score(double supervised_objective, double delta, const ObjectiveBounds& bounds,
               double beta) {
  double nobj = (supervised_objective - bounds.lower) / (bounds.upper - bounds.lower);
  if (bounds.direction == Direction::kLowerBetter) nobj = 1.0 - nobj;
  nobj = std::clamp(nobj, 0.0, 1.0);
  if (nobj == 0.0 || delta == 0.0) return 0.0;
  const double w = beta * beta / (1.0 + beta * beta);
  return 1.0 / (w / nobj + (1.0 - w) / delta);
}

double metric(Metric which, const Instance& instance) {
  check_size(instance.values.size());
  switch (which) {
    case Metric::kAvgpr: return average_precision(instance.values, instance.malicious);
    case Metric::kAuroc: return auroc(instance.values, instance.malicious);
    case Metric::kCalibrate: return calibrate(instance.values, instance.epsilon).threshold;
    case Metric::kSScore:
      if (instance.values.size() != 2) {
        throw Error(ErrorCode::kInvalidArgument, "s-score instance is {objective, delta}");
      }
      return oracle::s_score(instance.values[0], instance.values[1], instance.bounds, instance.beta);
  }
  throw Error(ErrorCode::kInvalidArgument, "unhandled oracle metric");
}

}  // namespace uqsup::oracle
