#pragma once

#include "uqsup/labels.hpp"
#include "uqsup/metrics.hpp"
#include "uqsup/quantifiers.hpp"
#include "uqsup/supervisor.hpp"

namespace uqsup {

struct PipelineOptions {
  BenignDefinition benign_definition = BenignDefinition::kCorrectOnly;
  CalibrationMode calibration_mode = CalibrationMode::kMinimalAbove;
  EvaluationOptions evaluation;
};

struct PipelineResult {
  SupervisorThreshold threshold;
  EvaluationReport report;
};

// Calibrate t on the validation assessments at target FPR epsilon, then
// supervise and evaluate the test assessments.
PipelineResult calibrate_and_evaluate(const AssessmentSet& validation,
                                      const LabelVector& validation_labels,
                                      const AssessmentSet& test, const LabelVector& test_labels,
                                      double epsilon, const PipelineOptions& options = {});

}  // namespace uqsup
