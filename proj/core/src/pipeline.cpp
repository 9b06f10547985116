#include "uqsup/pipeline.hpp"

namespace uqsup {

PipelineResult calibrate_and_evaluate(const AssessmentSet& validation,
                                      const LabelVector& validation_labels,
                                      const AssessmentSet& test, const LabelVector& test_labels,
                                      double epsilon, const PipelineOptions& options) {
  const auto malicious = label_malicious(validation, validation_labels,
                                         options.evaluation.acceptable_imprecision);
  PipelineResult result;
  result.threshold = calibrate_supervisor(validation, malicious, epsilon,
                                          options.benign_definition, options.calibration_mode);
  result.report = evaluate(test, test_labels, result.threshold, options.evaluation);
  return result;
}

}  // namespace uqsup
