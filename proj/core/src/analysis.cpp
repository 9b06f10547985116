#include "uqsup/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "uqsup/error.hpp"
#include "uqsup/metrics.hpp"
#include "uqsup/text_io.hpp"

namespace uqsup {

std::vector<double> fractional_ranks(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<double> ranks(scores.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // Positions i..j-1 cover ranks i+1..j.
    const double shared = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = shared;
    i = j;
  }
  return ranks;
}

RankTable rank_table(std::span<const RankObservation> observations) {
  if (observations.empty()) throw Error(ErrorCode::kEmptyInput, "no observations to rank");
  std::set<std::string> competitor_set;
  std::map<std::string, std::map<std::string, double>> by_group;
  for (const auto& obs : observations) {
    competitor_set.insert(obs.competitor);
    auto [it, inserted] = by_group[obs.group].emplace(obs.competitor, obs.score);
    if (!inserted) {
      throw Error(ErrorCode::kDuplicateEntry,
                  "competitor '" + obs.competitor + "' appears twice in group '" + obs.group +
                      "'");
    }
  }

  RankTable table;
  table.competitors.assign(competitor_set.begin(), competitor_set.end());
  table.mean_ranks.assign(table.competitors.size(), 0.0);
  for (const auto& [group, scores_by_name] : by_group) {
    std::vector<double> scores;
    scores.reserve(table.competitors.size());
    for (const auto& name : table.competitors) {
      auto it = scores_by_name.find(name);
      if (it == scores_by_name.end()) {
        throw Error(ErrorCode::kMissingCompetitor,
                    "group '" + group + "' lacks competitor '" + name + "'");
      }
      scores.push_back(it->second);
    }
    GroupRanks ranks{group, fractional_ranks(scores)};
    for (std::size_t c = 0; c < ranks.ranks.size(); ++c) table.mean_ranks[c] += ranks.ranks[c];
    table.groups.push_back(std::move(ranks));
  }
  for (double& r : table.mean_ranks) r /= static_cast<double>(table.groups.size());
  return table;
}

KeyAxis parse_key_axis(std::string_view text) {
  static const std::pair<std::string_view, KeyAxis> kAxes[] = {
      {"subject", KeyAxis::kSubject},           {"technique", KeyAxis::kTechnique},
      {"quantifier", KeyAxis::kQuantifier},     {"epsilon", KeyAxis::kEpsilon},
      {"distribution", KeyAxis::kDistribution}, {"epoch", KeyAxis::kEpoch},
      {"sample_count", KeyAxis::kSampleCount},  {"dropout_rate", KeyAxis::kDropoutRate},
  };
  for (const auto& [name, axis] : kAxes) {
    if (name == text) return axis;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown key axis '" + std::string(text) + "'");
}

std::string key_label(const ConfigKey& key, std::span<const KeyAxis> axes) {
  const auto opt = [](const auto& value) -> std::string {
    if (!value) return "-";
    if constexpr (std::is_same_v<std::decay_t<decltype(*value)>, double>) {
      return format_number(*value);
    } else {
      return std::to_string(*value);
    }
  };
  std::string label;
  for (KeyAxis axis : axes) {
    if (!label.empty()) label += '/';
    switch (axis) {
      case KeyAxis::kSubject: label += key.subject; break;
      case KeyAxis::kTechnique: label += key.technique; break;
      case KeyAxis::kQuantifier: label += to_string(key.quantifier); break;
      case KeyAxis::kEpsilon: label += format_number(key.epsilon); break;
      case KeyAxis::kDistribution: label += to_string(key.distribution); break;
      case KeyAxis::kEpoch: label += opt(key.epoch); break;
      case KeyAxis::kSampleCount: label += opt(key.sample_count); break;
      case KeyAxis::kDropoutRate: label += opt(key.dropout_rate); break;
    }
  }
  return label;
}

RankTable rank_reports(std::span<const ReportRecord> records,
                       std::span<const KeyAxis> group_axes,
                       std::span<const KeyAxis> competitor_axes, std::string_view metric) {
  std::vector<RankObservation> observations;
  observations.reserve(records.size());
  for (const auto& rec : records) {
    auto score = rec.metric(metric);
    if (!score) {
      throw Error(ErrorCode::kMissingCell, "report for " +
                                               key_label(rec.key, competitor_axes) + " has no " +
                                               std::string(metric));
    }
    observations.push_back(
        {key_label(rec.key, group_axes), key_label(rec.key, competitor_axes), *score});
  }
  return rank_table(observations);
}

std::vector<CurvePoint> sample_size_curve(const SampleTensor& validation,
                                          const LabelVector& validation_labels,
                                          const SampleTensor& test,
                                          const LabelVector& test_labels,
                                          Quantifier quantifier, double epsilon,
                                          std::size_t k_min, std::size_t k_max,
                                          const PipelineOptions& options) {
  if (is_point_quantifier(quantifier) || quantifier == Quantifier::kMeanVariance) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample-size curves need a sampling quantifier on a single tensor");
  }
  const std::size_t t_max = std::min(validation.samples(), test.samples());
  if (k_min < 2 || k_max > t_max || k_min > k_max) {
    throw Error(ErrorCode::kInvalidSamplePrefix,
                "k range must satisfy 2 <= k_min <= k_max <= T (T=" + std::to_string(t_max) +
                    ")");
  }
  check_aligned(validation, validation_labels);
  check_aligned(test, test_labels);

  std::vector<CurvePoint> curve;
  curve.reserve(k_max - k_min + 1);
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const QuantifierSpec spec{quantifier, k};
    const auto val = quantify(validation, spec);
    const auto tst = quantify(test, spec);
    const auto result =
        calibrate_and_evaluate(val, validation_labels, tst, test_labels, epsilon, options);
    curve.push_back({k, result.threshold.t, result.report.unsupervised_objective,
                     result.report.supervised_objective, result.report.acceptance_rate});
  }
  return curve;
}

AnalysisGrid::AnalysisGrid(std::vector<double> row_keys, std::vector<double> col_keys)
    : row_keys_(std::move(row_keys)),
      col_keys_(std::move(col_keys)),
      cells_(row_keys_.size() * col_keys_.size()) {}

AnalysisGrid parse_grid_csv(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty() || lines.front() != "epoch,sample_count,value") {
    throw Error(ErrorCode::kInvalidArgument, "grid CSV must start with 'epoch,sample_count,value'");
  }
  std::vector<std::tuple<double, double, double>> entries;
  std::set<double> rows;
  std::set<double> cols;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto cells = split(lines[i], ',');
    if (cells.size() != 3) {
      throw Error(ErrorCode::kInvalidArgument,
                  "grid CSV line " + std::to_string(i + 1) + " needs 3 cells");
    }
    const double r = parse_double(cells[0]);
    const double c = parse_double(cells[1]);
    rows.insert(r);
    cols.insert(c);
    entries.emplace_back(r, c, parse_double(cells[2]));
  }
  AnalysisGrid grid(std::vector<double>(rows.begin(), rows.end()),
                    std::vector<double>(cols.begin(), cols.end()));
  for (const auto& [r, c, v] : entries) {
    const auto ri = static_cast<std::size_t>(
        std::lower_bound(grid.row_keys().begin(), grid.row_keys().end(), r) -
        grid.row_keys().begin());
    const auto ci = static_cast<std::size_t>(
        std::lower_bound(grid.col_keys().begin(), grid.col_keys().end(), c) -
        grid.col_keys().begin());
    if (grid.at(ri, ci)) {
      throw Error(ErrorCode::kDuplicateEntry, "grid cell (" + format_number(r) + ", " +
                                                  format_number(c) + ") given twice");
    }
    grid.at(ri, ci) = v;
  }
  return grid;
}

SensitivityMaps sensitivity_maps(const AnalysisGrid& grid, std::size_t window) {
  if (window == 0 || window % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "window must be odd");
  }
  if (grid.rows() < window || grid.cols() < window) {
    throw Error(ErrorCode::kGridTooSmall, "grid is smaller than the " + std::to_string(window) +
                                              "x" + std::to_string(window) + " window");
  }
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      if (!grid.at(r, c)) {
        throw Error(ErrorCode::kMissingCell, "grid cell (" + format_number(grid.row_keys()[r]) +
                                                 ", " + format_number(grid.col_keys()[c]) +
                                                 ") is missing");
      }
    }
  }

  const std::size_t half = window / 2;
  const std::size_t out_rows = grid.rows() - window + 1;
  const std::size_t out_cols = grid.cols() - window + 1;
  std::vector<double> row_keys(grid.row_keys().begin() + half,
                               grid.row_keys().begin() + half + out_rows);
  std::vector<double> col_keys(grid.col_keys().begin() + half,
                               grid.col_keys().begin() + half + out_cols);
  SensitivityMaps maps{window, AnalysisGrid(row_keys, col_keys), AnalysisGrid(row_keys, col_keys),
                       std::nullopt};

  const double count = static_cast<double>(window * window);
  std::vector<double> flat_mean;
  std::vector<double> flat_std;
  for (std::size_t i = 0; i < out_rows; ++i) {
    for (std::size_t j = 0; j < out_cols; ++j) {
      // Deviations from the first cell keep constant windows exactly zero.
      const double origin = *grid.at(i, j);
      double shifted_sum = 0.0;
      for (std::size_t r = i; r < i + window; ++r) {
        for (std::size_t c = j; c < j + window; ++c) shifted_sum += *grid.at(r, c) - origin;
      }
      const double shifted_mean = shifted_sum / count;
      double ss = 0.0;
      for (std::size_t r = i; r < i + window; ++r) {
        for (std::size_t c = j; c < j + window; ++c) {
          const double d = *grid.at(r, c) - origin - shifted_mean;
          ss += d * d;
        }
      }
      const double mean = origin + shifted_mean;
      const double sd = std::sqrt(ss / count);
      maps.mean.at(i, j) = mean;
      maps.std.at(i, j) = sd;
      flat_mean.push_back(mean);
      flat_std.push_back(sd);
    }
  }
  try {
    maps.s_c = point_biserial(flat_mean, flat_std);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kZeroVariance) throw;
  }
  return maps;
}

std::vector<DropoutSummaryRow> dropout_rate_summary(
    std::span<const DropoutObservation> observations) {
  if (observations.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no AVGPR observations to summarize");
  }
  std::map<std::tuple<double, std::string, Quantifier>, std::vector<double>> groups;
  for (const auto& obs : observations) {
    if (!(obs.dropout_rate >= 0.0 && obs.dropout_rate <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "dropout rate must lie in [0,1]");
    }
    groups[{obs.dropout_rate, obs.subject, obs.quantifier}].push_back(obs.avgpr);
  }
  std::vector<DropoutSummaryRow> rows;
  for (const auto& [key, values] : groups) {
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), values.size(), mean,
                    std::sqrt(ss / n)});
  }
  return rows;
}

}  // namespace uqsup
