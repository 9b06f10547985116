#include "uqsup/supervisor.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "uqsup/error.hpp"
#include "uqsup/parallel.hpp"
#include "uqsup/text_io.hpp"

namespace uqsup {

std::string_view to_string(BenignDefinition d) {
  return d == BenignDefinition::kCorrectOnly ? "correct-only" : "all-nominal";
}

BenignDefinition parse_benign_definition(std::string_view text) {
  if (text == "correct-only") return BenignDefinition::kCorrectOnly;
  if (text == "all-nominal") return BenignDefinition::kAllNominal;
  throw Error(ErrorCode::kInvalidArgument,
              "benign definition must be 'correct-only' or 'all-nominal'");
}

std::vector<bool> label_malicious(const AssessmentSet& assessments, const LabelVector& labels,
                                  std::optional<double> acceptable_imprecision) {
  if (assessments.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "assessments and labels differ in length");
  }
  std::vector<bool> malicious(assessments.size());
  if (labels.kind == TensorKind::kClassifierSoftmax) {
    for (std::size_t i = 0; i < malicious.size(); ++i) {
      malicious[i] = assessments.items[i].predicted != static_cast<double>(labels.classes[i]);
    }
    return malicious;
  }
  if (!acceptable_imprecision) {
    throw Error(ErrorCode::kMissingImprecisionBound,
                "regression needs an acceptable-imprecision bound");
  }
  for (std::size_t i = 0; i < malicious.size(); ++i) {
    malicious[i] =
        std::abs(assessments.items[i].predicted - labels.targets[i]) > *acceptable_imprecision;
  }
  return malicious;
}

double false_positive_rate(std::span<const double> benign_uncertainties, double t) {
  std::size_t rejected = 0;
  for (double u : benign_uncertainties) rejected += u >= t ? 1 : 0;
  return static_cast<double>(rejected) / static_cast<double>(benign_uncertainties.size());
}

CalibrationResult calibrate_threshold(std::span<const double> benign_uncertainties,
                                      double epsilon, CalibrationMode mode) {
  if (benign_uncertainties.empty()) {
    throw Error(ErrorCode::kEmptyInput, "cannot calibrate on an empty benign set");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorCode::kEpsilonOutOfRange, "epsilon must lie in (0,1)");
  }
  std::vector<double> sorted(benign_uncertainties.begin(), benign_uncertainties.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto fpr_at = [n](std::size_t first_index) {
    return static_cast<double>(n - first_index) / static_cast<double>(n);
  };

  CalibrationResult result;
  result.calibration_size = n;
  result.coarse_granularity = static_cast<double>(n) * epsilon < 1.0;

  if (mode == CalibrationMode::kMinimalAbove) {
    // Walk distinct values from the top; FPR only grows as t decreases, so the
    // first candidate reaching epsilon is the largest feasible t. The minimum
    // value always reaches FPR = 1 >= epsilon.
    std::size_t end = n;
    while (end > 0) {
      const double value = sorted[end - 1];
      std::size_t first = end - 1;
      while (first > 0 && sorted[first - 1] == value) --first;
      const double fpr = fpr_at(first);
      if (fpr >= epsilon) {
        result.threshold = value;
        result.realized_fpr = fpr;
        return result;
      }
      end = first;
    }
    throw Error(ErrorCode::kInvalidArgument, "no feasible threshold");  // unreachable
  }

  // Closest: start from t = +inf (FPR 0) and scan every distinct value.
  double best_t = std::numeric_limits<double>::infinity();
  double best_fpr = 0.0;
  auto better = [epsilon](double fpr, double incumbent) {
    double d = std::abs(fpr - epsilon);
    double di = std::abs(incumbent - epsilon);
    if (d != di) return d < di;
    return fpr >= epsilon && incumbent < epsilon;
  };
  for (std::size_t first = 0; first < n;) {
    std::size_t next = first;
    while (next < n && sorted[next] == sorted[first]) ++next;
    const double fpr = fpr_at(first);
    if (better(fpr, best_fpr)) {
      best_t = sorted[first];
      best_fpr = fpr;
    }
    first = next;
  }
  result.threshold = best_t;
  result.realized_fpr = best_fpr;
  return result;
}

SupervisorThreshold calibrate_supervisor(const AssessmentSet& validation,
                                         const std::vector<bool>& malicious, double epsilon,
                                         BenignDefinition definition, CalibrationMode mode) {
  if (malicious.size() != validation.size()) {
    throw Error(ErrorCode::kLengthMismatch, "malicious mask and assessments differ in length");
  }
  std::vector<double> benign;
  benign.reserve(validation.size());
  for (std::size_t i = 0; i < validation.size(); ++i) {
    if (definition == BenignDefinition::kAllNominal || !malicious[i]) {
      benign.push_back(validation.items[i].uncertainty);
    }
  }
  const CalibrationResult cal = calibrate_threshold(benign, epsilon, mode);
  SupervisorThreshold threshold;
  threshold.quantifier = validation.quantifier;
  threshold.t = cal.threshold;
  threshold.epsilon = epsilon;
  threshold.realized_fpr = cal.realized_fpr;
  threshold.calibration_size = cal.calibration_size;
  threshold.benign_definition = definition;
  return threshold;
}

std::vector<SupervisionDecision> supervise(const AssessmentSet& assessments,
                                           const SupervisorThreshold& threshold) {
  if (assessments.quantifier != threshold.quantifier) {
    throw Error(ErrorCode::kQuantifierMismatch,
                "threshold was calibrated for " + std::string(to_string(threshold.quantifier)) +
                    ", assessments come from " +
                    std::string(to_string(assessments.quantifier)));
  }
  std::vector<SupervisionDecision> decisions(assessments.size());
  parallel_for(decisions.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double u = assessments.items[i].uncertainty;
      decisions[i] = SupervisionDecision{u < threshold.t, u};
    }
  });
  return decisions;
}

std::size_t accepted_count(std::span<const SupervisionDecision> decisions) {
  return static_cast<std::size_t>(std::count_if(
      decisions.begin(), decisions.end(), [](const auto& d) { return d.accepted; }));
}

std::string format_threshold(const SupervisorThreshold& threshold) {
  nlohmann::ordered_json j;
  j["quantifier"] = to_string(threshold.quantifier);
  if (std::isinf(threshold.t)) {
    j["t"] = threshold.t > 0 ? "inf" : "-inf";
  } else {
    j["t"] = threshold.t;
  }
  j["epsilon"] = threshold.epsilon;
  j["realized_fpr"] = threshold.realized_fpr;
  j["calibration_size"] = threshold.calibration_size;
  j["benign_definition"] = to_string(threshold.benign_definition);
  return j.dump(2) + "\n";
}

SupervisorThreshold parse_threshold(std::string_view json) {
  SupervisorThreshold threshold;
  try {
    auto j = nlohmann::json::parse(json);
    threshold.quantifier = parse_quantifier(j.at("quantifier").get<std::string>());
    const auto& t = j.at("t");
    threshold.t = t.is_string() ? parse_double(t.get<std::string>()) : t.get<double>();
    threshold.epsilon = j.at("epsilon").get<double>();
    threshold.realized_fpr = j.at("realized_fpr").get<double>();
    threshold.calibration_size = j.at("calibration_size").get<std::size_t>();
    threshold.benign_definition =
        parse_benign_definition(j.value("benign_definition", std::string("correct-only")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad threshold JSON: ") + e.what());
  }
  return threshold;
}

SupervisorThreshold read_threshold(const std::filesystem::path& path) {
  return parse_threshold(read_text_file(path));
}

void write_threshold(const SupervisorThreshold& threshold, const std::filesystem::path& path) {
  write_file_atomic(path, format_threshold(threshold));
}

}  // namespace uqsup
