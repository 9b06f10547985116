#pragma once

// Exhaustive-enumeration reference implementations for small instances.
// They share no code with the fast paths they check: every candidate
// threshold is enumerated and every count is taken by a full scan.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "uqsup/metrics.hpp"
#include "uqsup/supervisor.hpp"

namespace uqsup::oracle {

inline constexpr std::size_t kMaxInstance = 12;

enum class Metric { kAvgpr, kAuroc, kCalibrate, kSScore };
Metric parse_metric(std::string_view text);

// Recall-weighted precision summed over all distinct thresholds, highest first.
double average_precision(std::span<const double> uncertainties, const std::vector<bool>& malicious);
// Pairwise count: (#{u_m > u_b} + #{u_m == u_b} / 2) / (P * N).
double auroc(std::span<const double> uncertainties, const std::vector<bool>& malicious);
// Minimal FPR >= epsilon over every candidate (distinct values and +inf).
CalibrationResult calibrate(std::span<const double> benign_uncertainties, double epsilon);
// Reciprocal form 1 / ((b^2/(1+b^2)) / nobj + (1/(1+b^2)) / delta).
double s_score(double supervised_objective, double delta, const ObjectiveBounds& bounds,
               double beta);

struct Instance {
  std::vector<double> values;
  std::vector<bool> malicious;  // avgpr / auroc
  double epsilon = 0.1;         // calibrate
  // s-score: values = {supervised objective, delta}
  ObjectiveBounds bounds = accuracy_bounds();
  double beta = 1.0;
};

// Dispatches to the reference above; throws kInstanceTooLarge beyond 12 values.
double metric(Metric which, const Instance& instance);

}  // namespace uqsup::oracle
