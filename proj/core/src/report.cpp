#include "uqsup/report.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "json.hpp"
#include "uqsup/error.hpp"
#include "uqsup/text_io.hpp"

namespace uqsup {
namespace {

// Columns that identify the configuration rather than measure it.
constexpr std::string_view kKeyColumns[] = {"subject",     "technique", "quantifier",
                                            "epsilon",     "distribution", "epoch",
                                            "sample_count", "dropout_rate", "objective"};

template <typename T>
nlohmann::ordered_json optional_json(const std::optional<T>& value) {
  return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json number_json(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

std::string cell(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string();
}

std::string cell(const std::optional<std::int64_t>& value) {
  return value ? std::to_string(*value) : std::string();
}

std::string checked_tag(const std::string& tag) {
  if (tag.find_first_of(",\n\r\"") != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument,
                "tags may not contain commas, quotes or newlines: '" + tag + "'");
  }
  return tag;
}

std::string beta_column(double beta) { return "s_" + format_number(beta); }

}  // namespace

bool operator<(const ConfigKey& a, const ConfigKey& b) {
  const auto rank = [](const ConfigKey& k) {
    return std::tie(k.subject, k.technique, k.quantifier, k.epsilon, k.distribution, k.epoch,
                    k.sample_count, k.dropout_rate);
  };
  return rank(a) < rank(b);
}

std::string format_reports_json(const std::vector<ReportRow>& rows) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    const auto& k = row.key;
    const auto& r = row.report;
    nlohmann::ordered_json key;
    key["subject"] = k.subject;
    key["technique"] = k.technique;
    key["quantifier"] = to_string(k.quantifier);
    key["epsilon"] = k.epsilon;
    key["distribution"] = to_string(k.distribution);
    key["epoch"] = optional_json(k.epoch);
    key["sample_count"] = optional_json(k.sample_count);
    key["dropout_rate"] = optional_json(k.dropout_rate);

    nlohmann::ordered_json threshold;
    threshold["t"] = number_json(row.threshold.t);
    threshold["realized_fpr"] = row.threshold.realized_fpr;
    threshold["calibration_size"] = row.threshold.calibration_size;
    threshold["benign_definition"] = to_string(row.threshold.benign_definition);

    nlohmann::ordered_json s_scores = nlohmann::ordered_json::array();
    for (const auto& s : r.s_scores) s_scores.push_back({{"beta", s.beta}, {"value", s.value}});

    const auto& b = r.binary;
    nlohmann::ordered_json binary;
    binary["tpr"] = optional_json(b.tpr);
    binary["fpr"] = optional_json(b.fpr);
    binary["tnr"] = optional_json(b.tnr);
    binary["fnr"] = optional_json(b.fnr);
    binary["f1"] = b.f1;
    binary["acc"] = b.accuracy;

    nlohmann::ordered_json free;
    free["avgpr"] = optional_json(r.threshold_free.avgpr);
    free["auroc"] = optional_json(r.threshold_free.auroc);
    free["point_biserial"] = optional_json(r.threshold_free.point_biserial);

    nlohmann::ordered_json counts;
    counts["accepted"] = r.accepted;
    counts["rejected"] = r.rejected;
    counts["benign"] = r.benign;
    counts["malicious"] = r.malicious;

    nlohmann::ordered_json entry;
    entry["key"] = key;
    entry["threshold"] = threshold;
    entry["objective"] = to_string(r.objective);
    entry["unsupervised_objective"] = r.unsupervised_objective;
    entry["supervised_objective"] = optional_json(r.supervised_objective);
    entry["acceptance_rate"] = r.acceptance_rate;
    entry["s_scores"] = s_scores;
    entry["normalized_objective_clipped"] = r.normalized_objective_clipped;
    entry["binary"] = binary;
    entry["threshold_free"] = free;
    entry["counts"] = counts;
    out.push_back(entry);
  }
  return out.dump(2) + "\n";
}

std::string format_reports_csv(const std::vector<ReportRow>& rows) {
  std::vector<double> betas;
  if (!rows.empty()) {
    for (const auto& s : rows.front().report.s_scores) betas.push_back(s.beta);
  }
  std::string out =
      "subject,technique,quantifier,epsilon,distribution,epoch,sample_count,dropout_rate,"
      "objective,obj,obj_sup,delta";
  for (double beta : betas) out += "," + beta_column(beta);
  out +=
      ",tpr,fpr,tnr,fnr,f1,bin_acc,avgpr,auroc,point_biserial,accepted,rejected,benign,"
      "malicious,threshold,realized_fpr\n";

  for (const auto& row : rows) {
    const auto& k = row.key;
    const auto& r = row.report;
    std::vector<std::string> cells = {
        checked_tag(k.subject),
        checked_tag(k.technique),
        std::string(to_string(k.quantifier)),
        format_number(k.epsilon),
        std::string(to_string(k.distribution)),
        cell(k.epoch),
        cell(k.sample_count),
        cell(k.dropout_rate),
        std::string(to_string(r.objective)),
        format_number(r.unsupervised_objective),
        cell(r.supervised_objective),
        format_number(r.acceptance_rate),
    };
    for (double beta : betas) cells.push_back(cell(r.s_score(beta)));
    const auto& b = r.binary;
    for (const auto& v : {b.tpr, b.fpr, b.tnr, b.fnr}) cells.push_back(cell(v));
    cells.push_back(format_number(b.f1));
    cells.push_back(format_number(b.accuracy));
    cells.push_back(cell(r.threshold_free.avgpr));
    cells.push_back(cell(r.threshold_free.auroc));
    cells.push_back(cell(r.threshold_free.point_biserial));
    for (std::size_t c : {r.accepted, r.rejected, r.benign, r.malicious}) {
      cells.push_back(std::to_string(c));
    }
    cells.push_back(format_number(row.threshold.t));
    cells.push_back(format_number(row.threshold.realized_fpr));

    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += cells[i];
    }
    out += '\n';
  }
  return out;
}

std::optional<double> ReportRecord::metric(std::string_view name) const {
  auto it = metrics.find(name);
  if (it == metrics.end()) {
    throw Error(ErrorCode::kInvalidArgument, "report has no column '" + std::string(name) + "'");
  }
  return it->second;
}

std::vector<ReportRecord> parse_reports_csv(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::kEmptyInput, "report CSV is empty");
  auto header = split(lines.front(), ',');
  std::map<std::string_view, std::size_t, std::less<>> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (std::string_view required : {"subject", "technique", "quantifier", "epsilon",
                                    "distribution"}) {
    if (!column.count(required)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "report CSV lacks column '" + std::string(required) + "'");
    }
  }
  const auto optional_field = [&](const std::vector<std::string_view>& cells,
                                  std::string_view name) -> std::string_view {
    auto it = column.find(name);
    return it == column.end() ? std::string_view() : cells[it->second];
  };

  std::vector<ReportRecord> records;
  for (std::size_t line = 1; line < lines.size(); ++line) {
    auto cells = split(lines[line], ',');
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "report CSV line " + std::to_string(line + 1) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(header.size()));
    }
    ReportRecord rec;
    auto& k = rec.key;
    k.subject = std::string(cells[column["subject"]]);
    k.technique = std::string(cells[column["technique"]]);
    k.quantifier = parse_quantifier(cells[column["quantifier"]]);
    k.epsilon = parse_double(cells[column["epsilon"]]);
    k.distribution = parse_distribution(cells[column["distribution"]]);
    if (auto v = optional_field(cells, "epoch"); !v.empty()) k.epoch = parse_integer(v);
    if (auto v = optional_field(cells, "sample_count"); !v.empty()) {
      k.sample_count = parse_integer(v);
    }
    if (auto v = optional_field(cells, "dropout_rate"); !v.empty()) {
      k.dropout_rate = parse_double(v);
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
      const bool is_key =
          std::find(std::begin(kKeyColumns), std::end(kKeyColumns), header[i]) !=
          std::end(kKeyColumns);
      if (is_key) continue;
      rec.metrics.emplace(std::string(header[i]),
                          cells[i].empty() ? std::nullopt
                                           : std::optional<double>(parse_double(cells[i])));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace uqsup
