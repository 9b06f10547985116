#pragma once

// Cross-configuration analyses: rank-order tables, sample-size convergence,
// hyperparameter sensitivity maps and dropout-rate aggregation.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uqsup/labels.hpp"
#include "uqsup/pipeline.hpp"
#include "uqsup/quantifiers.hpp"
#include "uqsup/report.hpp"
#include "uqsup/tensor_io.hpp"

namespace uqsup {

// ---------------------------------------------------------------- ranking

struct RankObservation {
  std::string group;
  std::string competitor;
  double score = 0.0;  // higher is better
};

struct GroupRanks {
  std::string group;
  std::vector<double> ranks;  // aligned with RankTable::competitors
};

struct RankTable {
  std::vector<std::string> competitors;  // sorted
  std::vector<double> mean_ranks;
  std::vector<GroupRanks> groups;        // sorted by group name
  std::size_t group_count() const noexcept { return groups.size(); }
};

// Rank 1 = highest score; tied scores share the mean of the ranks they cover.
std::vector<double> fractional_ranks(std::span<const double> scores);

// Every group must contain every competitor exactly once.
RankTable rank_table(std::span<const RankObservation> observations);

enum class KeyAxis {
  kSubject,
  kTechnique,
  kQuantifier,
  kEpsilon,
  kDistribution,
  kEpoch,
  kSampleCount,
  kDropoutRate,
};

KeyAxis parse_key_axis(std::string_view text);
std::string key_label(const ConfigKey& key, std::span<const KeyAxis> axes);

// Groups report records by group_axes, names competitors by competitor_axes
// and ranks on the given metric column (s_1 by default).
RankTable rank_reports(std::span<const ReportRecord> records,
                       std::span<const KeyAxis> group_axes,
                       std::span<const KeyAxis> competitor_axes,
                       std::string_view metric = "s_1");

// ------------------------------------------------------------ sample size

struct CurvePoint {
  std::size_t k = 0;
  double threshold = 0.0;
  double unsupervised_objective = 0.0;
  std::optional<double> supervised_objective;
  double acceptance_rate = 0.0;
};

// For each k in [k_min, k_max], quantify with the first k samples,
// recalibrate on the validation dump and evaluate on the test dump.
std::vector<CurvePoint> sample_size_curve(const SampleTensor& validation,
                                          const LabelVector& validation_labels,
                                          const SampleTensor& test,
                                          const LabelVector& test_labels,
                                          Quantifier quantifier, double epsilon,
                                          std::size_t k_min, std::size_t k_max,
                                          const PipelineOptions& options = {});

// ------------------------------------------------------------ sensitivity

// Rectangular grid of supervised-objective values. Rows are epochs and
// columns sample counts, both ascending.
class AnalysisGrid {
 public:
  AnalysisGrid() = default;
  AnalysisGrid(std::vector<double> row_keys, std::vector<double> col_keys);

  std::size_t rows() const noexcept { return row_keys_.size(); }
  std::size_t cols() const noexcept { return col_keys_.size(); }
  const std::vector<double>& row_keys() const noexcept { return row_keys_; }
  const std::vector<double>& col_keys() const noexcept { return col_keys_; }

  std::optional<double>& at(std::size_t r, std::size_t c) { return cells_[r * cols() + c]; }
  const std::optional<double>& at(std::size_t r, std::size_t c) const {
    return cells_[r * cols() + c];
  }

 private:
  std::vector<double> row_keys_;
  std::vector<double> col_keys_;
  std::vector<std::optional<double>> cells_;
};

// Long format "epoch,sample_count,value"; absent combinations stay missing.
AnalysisGrid parse_grid_csv(std::string_view text);

struct SensitivityMaps {
  std::size_t window = 5;
  // Interior cells only: entry (i, j) is centred on grid cell
  // (i + window/2, j + window/2).
  AnalysisGrid mean;
  AnalysisGrid std;
  // Pearson correlation of mean and std over interior cells; nullopt when
  // either map is constant.
  std::optional<double> s_c;
};

// Neighbourhood mean and population standard deviation over window x window
// blocks (odd window, no padding).
SensitivityMaps sensitivity_maps(const AnalysisGrid& grid, std::size_t window = 5);

// ---------------------------------------------------------- dropout rates

struct DropoutObservation {
  std::string subject;
  Quantifier quantifier = Quantifier::kMeanSoftmax;
  double dropout_rate = 0.0;
  double avgpr = 0.0;
};

struct DropoutSummaryRow {
  double dropout_rate = 0.0;
  std::string subject;
  Quantifier quantifier = Quantifier::kMeanSoftmax;
  std::size_t repetitions = 0;
  double mean_avgpr = 0.0;
  double std_avgpr = 0.0;  // population
};

// Groups by (rate, subject, quantifier); rows ordered by ascending rate.
std::vector<DropoutSummaryRow> dropout_rate_summary(
    std::span<const DropoutObservation> observations);

}  // namespace uqsup
