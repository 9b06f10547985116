#pragma once

// Keyed evaluation results and their JSON / CSV serializations. JSON is the
// full record; the CSV row is a flat projection with one column per metric.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uqsup/manifest.hpp"
#include "uqsup/metrics.hpp"
#include "uqsup/quantifiers.hpp"
#include "uqsup/supervisor.hpp"

namespace uqsup {

// Identifies one evaluation in a result set.
struct ConfigKey {
  std::string subject;
  std::string technique;
  Quantifier quantifier = Quantifier::kMaxSoftmax;
  double epsilon = 0.0;
  Distribution distribution = Distribution::kNominal;
  std::optional<std::int64_t> epoch;
  std::optional<std::int64_t> sample_count;
  std::optional<double> dropout_rate;

  friend bool operator==(const ConfigKey&, const ConfigKey&) = default;
};

bool operator<(const ConfigKey& a, const ConfigKey& b);

struct ReportRow {
  ConfigKey key;
  SupervisorThreshold threshold;
  EvaluationReport report;
};

std::string format_reports_json(const std::vector<ReportRow>& rows);
// Header row plus one line per report. S-score columns are named s_<beta>
// (s_1 for beta = 1) from the betas of the first row.
std::string format_reports_csv(const std::vector<ReportRow>& rows);

// A parsed CSV report row: the key plus every numeric column by name.
// Empty cells (undefined metrics) parse to nullopt.
struct ReportRecord {
  ConfigKey key;
  std::map<std::string, std::optional<double>, std::less<>> metrics;

  std::optional<double> metric(std::string_view name) const;
};

std::vector<ReportRecord> parse_reports_csv(std::string_view text);

}  // namespace uqsup
