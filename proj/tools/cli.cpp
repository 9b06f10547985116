#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string_view>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"
#include "uqsup/analysis.hpp"
#include "uqsup/error.hpp"
#include "uqsup/labels.hpp"
#include "uqsup/manifest.hpp"
#include "uqsup/metrics.hpp"
#include "uqsup/pipeline.hpp"
#include "uqsup/quantifiers.hpp"
#include "uqsup/report.hpp"
#include "uqsup/supervisor.hpp"
#include "uqsup/synthgen.hpp"
#include "uqsup/tensor_io.hpp"
#include "uqsup/text_io.hpp"

namespace uqsup::cli {
namespace {

namespace fs = std::filesystem;

// Pending artifacts, written only once the whole command has succeeded.
class Outputs {
 public:
  void add(fs::path path, std::string content) {
    files_.emplace_back(std::move(path), std::move(content));
  }
  void add(fs::path path, const std::vector<std::byte>& bytes) {
    std::string content(bytes.size(), '\0');
    std::transform(bytes.begin(), bytes.end(), content.begin(),
                   [](std::byte b) { return static_cast<char>(b); });
    add(std::move(path), std::move(content));
  }

  void commit(std::ostream& out) const {
    for (const auto& [path, content] : files_) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      write_file_atomic(path, content);
      out << "wrote " << path.string() << "\n";
    }
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

std::string format_assessments(const AssessmentSet& set) {
  std::string out = "index,predicted,uncertainty\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    out += std::to_string(i) + "," + format_number(set.items[i].predicted) + "," +
           format_number(set.items[i].uncertainty) + "\n";
  }
  return out;
}

AssessmentSet parse_assessments(std::string_view text, Quantifier quantifier) {
  auto lines = split_lines(text);
  if (lines.empty() || lines.front() != "index,predicted,uncertainty") {
    throw Error(ErrorCode::kInvalidArgument,
                "assessment CSV must start with 'index,predicted,uncertainty'");
  }
  AssessmentSet set;
  set.quantifier = quantifier;
  for (std::size_t line = 1; line < lines.size(); ++line) {
    if (lines[line].empty()) continue;
    auto cells = split(lines[line], ',');
    if (cells.size() != 3) {
      throw Error(ErrorCode::kInvalidArgument,
                  "assessment CSV line " + std::to_string(line + 1) + " needs 3 cells");
    }
    if (parse_integer(cells[0]) != static_cast<long long>(set.size())) {
      throw Error(ErrorCode::kNonContiguousIndex,
                  "assessment CSV line " + std::to_string(line + 1) + " is out of order");
    }
    set.items.push_back({parse_double(cells[1]), parse_double(cells[2])});
  }
  if (set.size() == 0) throw Error(ErrorCode::kEmptyInput, "assessment CSV has no rows");
  return set;
}

struct LongRow {
  std::string x;
  std::string y;
  double value = 0.0;
  std::string series;
};

std::string format_long(const std::vector<LongRow>& rows) {
  std::string out = "x,y,value,series\n";
  for (const auto& r : rows) {
    out += r.x + "," + r.y + "," + format_number(r.value) + "," + r.series + "\n";
  }
  return out;
}

std::string optional_cell(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::string format_matrix(const AnalysisGrid& grid) {
  std::string out = "epoch/sample_count";
  for (double c : grid.col_keys()) out += "," + format_number(c);
  out += "\n";
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    out += format_number(grid.row_keys()[r]);
    for (std::size_t c = 0; c < grid.cols(); ++c) out += "," + optional_cell(grid.at(r, c));
    out += "\n";
  }
  return out;
}

void append_long(std::vector<LongRow>& rows, const AnalysisGrid& grid, const std::string& series) {
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      if (!grid.at(r, c)) continue;
      rows.push_back({format_number(grid.col_keys()[c]), format_number(grid.row_keys()[r]),
                      *grid.at(r, c), series});
    }
  }
}

std::vector<Quantifier> parse_quantifiers(const std::vector<std::string>& names) {
  std::vector<Quantifier> out;
  for (const auto& n : names) {
    Quantifier q = parse_quantifier(n);
    if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
  }
  return out;
}

std::vector<KeyAxis> parse_axes(const std::vector<std::string>& names) {
  std::vector<KeyAxis> out;
  for (const auto& n : names) out.push_back(parse_key_axis(n));
  return out;
}

std::vector<ReportRecord> read_reports(const std::vector<std::string>& paths) {
  std::vector<ReportRecord> records;
  for (const auto& p : paths) {
    auto part = parse_reports_csv(read_text_file(p));
    records.insert(records.end(), part.begin(), part.end());
  }
  return records;
}

// Flags shared by every command that calibrates a threshold.
struct CalibrationFlags {
  bool closest = false;
  std::string benign = "correct-only";
  std::optional<double> imprecision;

  void attach(CLI::App* cmd) {
    cmd->add_flag("--closest", closest, "Pick the realized FPR closest to epsilon");
    cmd->add_option("--benign-definition", benign,
                    "Inputs used for calibration: correct-only or all-nominal")
        ->capture_default_str();
    cmd->add_option("--imprecision", imprecision,
                    "Acceptable absolute error for regression outputs");
  }

  PipelineOptions options() const {
    PipelineOptions o;
    o.benign_definition = parse_benign_definition(benign);
    o.calibration_mode = closest ? CalibrationMode::kClosest : CalibrationMode::kMinimalAbove;
    o.evaluation.acceptable_imprecision = imprecision;
    return o;
  }
};

struct Dump {
  SampleTensor tensor;
  std::optional<SampleTensor> variances;
  LabelVector labels;
  std::optional<RunManifest> manifest;
  std::string stem;
};

Dump load_dump(const fs::path& tensor_path, const fs::path& labels_path,
               const std::optional<fs::path>& variances_path, bool renormalize) {
  Dump d;
  ValidationOptions opts;
  opts.renormalize = renormalize;
  d.tensor = read_tensor(tensor_path, opts);
  if (variances_path) d.variances = read_tensor(*variances_path);
  std::optional<std::size_t> classes;
  if (d.tensor.is_classifier()) classes = d.tensor.classes();
  d.labels = read_labels(labels_path, d.tensor.kind(), classes);
  check_aligned(d.tensor, d.labels);
  const auto manifest = manifest_path_for(tensor_path);
  if (fs::exists(manifest)) d.manifest = read_manifest(manifest);
  d.stem = tensor_path.stem().string();
  return d;
}

std::optional<std::size_t> prefix_for(Quantifier q, std::optional<std::size_t> samples) {
  return is_point_quantifier(q) ? std::nullopt : samples;
}

AssessmentSet assess(const Dump& d, Quantifier q, std::optional<std::size_t> samples) {
  return quantify(d.tensor, {q, prefix_for(q, samples)},
                  d.variances ? &*d.variances : nullptr);
}

// ---------------------------------------------------------------- synth

struct SynthCommand {
  GeneratorConfig config;
  bool regression = false;
  std::string out;
  std::string dataset = "synthetic";
  std::string technique = "synthetic";
  std::string split = "test";
  std::string distribution = "nominal";
  std::optional<std::int64_t> epoch;
  std::optional<double> dropout_rate;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("synth", "Generate a synthetic prediction dump");
    cmd->add_option("--out", out, "Output path prefix; writes <out>.uqt, <out>.labels.csv, "
                                  "<out>.manifest.json")
        ->required();
    cmd->add_option("--seed", config.seed)->capture_default_str();
    cmd->add_option("--inputs", config.inputs)->capture_default_str();
    cmd->add_option("--samples", config.samples)->capture_default_str();
    cmd->add_option("--classes", config.classes)->capture_default_str();
    cmd->add_option("--noise", config.noise_scale, "Noise scale")->capture_default_str();
    cmd->add_option("--mislabel-link", config.mislabel_link,
                    "Probability that a hard input is mislabelled")
        ->capture_default_str();
    cmd->add_flag("--regression", regression,
                  "Emit a regression dump (means, <out>.var.uqt variances, targets)");
    cmd->add_option("--dataset", dataset)->capture_default_str();
    cmd->add_option("--technique", technique)->capture_default_str();
    cmd->add_option("--split", split, "validation or test")->capture_default_str();
    cmd->add_option("--distribution", distribution, "nominal or ood")->capture_default_str();
    cmd->add_option("--epoch", epoch);
    cmd->add_option("--dropout-rate", dropout_rate);
  }

  void execute(Outputs& outputs) const {
    RunManifest m;
    m.dataset_tag = dataset;
    m.technique_tag = technique;
    m.split = parse_split(split);
    m.distribution = parse_distribution(distribution);
    m.epoch = epoch;
    m.dropout_rate = dropout_rate;
    const fs::path tensor_path = out + ".uqt";
    if (regression) {
      auto set = generate_regression(config);
      outputs.add(tensor_path, encode_tensor(set.means));
      outputs.add(out + ".var.uqt", encode_tensor(set.variances));
      outputs.add(out + ".labels.csv", format_labels(set.targets));
    } else {
      auto set = generate(config);
      outputs.add(tensor_path, encode_tensor(set.tensor));
      outputs.add(out + ".labels.csv", format_labels(set.labels));
    }
    outputs.add(manifest_path_for(tensor_path), format_manifest(m));
  }
};

// ---------------------------------------------------------------- quantify

struct QuantifyCommand {
  std::string tensor;
  std::optional<std::string> variances;
  std::vector<std::string> quantifiers;
  std::optional<std::size_t> samples;
  bool renormalize = false;
  std::string out_dir = ".";

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("quantify", "Write one assessment CSV per quantifier");
    cmd->add_option("--tensor", tensor)->required();
    cmd->add_option("--variances", variances, "Variance tensor for mean-var");
    cmd->add_option("--quantifier", quantifiers, "Comma-separated quantifier names")
        ->required()
        ->delimiter(',');
    cmd->add_option("--samples", samples, "Use only the first k samples");
    cmd->add_flag("--renormalize", renormalize, "Rescale softmax rows that drift from 1");
    cmd->add_option("--out-dir", out_dir)->capture_default_str();
  }

  void execute(Outputs& outputs) const {
    ValidationOptions opts;
    opts.renormalize = renormalize;
    const auto t = read_tensor(tensor, opts);
    std::optional<SampleTensor> v;
    if (variances) v = read_tensor(*variances);
    const auto stem = fs::path(tensor).stem().string();
    for (Quantifier q : parse_quantifiers(quantifiers)) {
      auto set = quantify(t, {q, prefix_for(q, samples)}, v ? &*v : nullptr);
      outputs.add(fs::path(out_dir) / (stem + "." + std::string(to_string(q)) + ".csv"),
                  format_assessments(set));
    }
  }
};

// ---------------------------------------------------------------- calibrate

struct CalibrateCommand {
  std::string assessments;
  std::string labels;
  std::string quantifier;
  double epsilon = 0.0;
  CalibrationFlags flags;
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("calibrate", "Fit a supervisor threshold at a target FPR");
    cmd->add_option("--assessments", assessments, "Validation assessment CSV")->required();
    cmd->add_option("--labels", labels, "Validation labels CSV")->required();
    cmd->add_option("--quantifier", quantifier)->required();
    cmd->add_option("--epsilon", epsilon, "Target false positive rate")->required();
    cmd->add_option("--out", out, "Threshold JSON")->required();
    flags.attach(cmd);
  }

  void execute(Outputs& outputs, std::ostream& log) const {
    const Quantifier q = parse_quantifier(quantifier);
    const auto set = parse_assessments(read_text_file(assessments), q);
    const auto kind =
        is_regression_quantifier(q) ? TensorKind::kRegression : TensorKind::kClassifierSoftmax;
    const auto lv = read_labels(labels, kind);
    const auto options = flags.options();
    const auto malicious = label_malicious(set, lv, options.evaluation.acceptable_imprecision);
    const auto th = calibrate_supervisor(set, malicious, epsilon, options.benign_definition,
                                         options.calibration_mode);
    log << "t = " << format_number(th.t) << ", realized fpr = "
        << format_number(th.realized_fpr) << " over " << th.calibration_size << " inputs\n";
    outputs.add(out, format_threshold(th));
  }
};

// ---------------------------------------------------------------- supervise

struct SuperviseCommand {
  std::string assessments;
  std::string threshold;
  std::optional<std::string> quantifier;
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("supervise", "Accept or reject each input");
    cmd->add_option("--assessments", assessments)->required();
    cmd->add_option("--threshold", threshold, "Threshold JSON from calibrate")->required();
    cmd->add_option("--quantifier", quantifier,
                    "Quantifier of the assessments (defaults to the threshold's)");
    cmd->add_option("--out", out, "Decision CSV")->required();
  }

  void execute(Outputs& outputs, std::ostream& log) const {
    const auto th = parse_threshold(read_text_file(threshold));
    const Quantifier q = quantifier ? parse_quantifier(*quantifier) : th.quantifier;
    const auto decisions = supervise(parse_assessments(read_text_file(assessments), q), th);
    std::string csv = "index,uncertainty,accepted\n";
    for (std::size_t i = 0; i < decisions.size(); ++i) {
      csv += std::to_string(i) + "," + format_number(decisions[i].uncertainty) + "," +
             (decisions[i].accepted ? "1" : "0") + "\n";
    }
    log << accepted_count(decisions) << " of " << decisions.size() << " accepted\n";
    outputs.add(out, std::move(csv));
  }
};

// ---------------------------------------------------------------- evaluate

struct EvaluateCommand {
  std::string validation;
  std::string validation_labels;
  std::optional<std::string> validation_variances;
  std::vector<std::string> tests;
  std::vector<std::string> test_labels;
  std::vector<std::string> test_variances;
  std::vector<std::string> quantifiers;
  std::vector<double> epsilons;
  std::vector<double> betas{1.0};
  std::vector<double> bounds;
  std::optional<std::size_t> samples;
  std::optional<std::string> subject;
  std::optional<std::string> technique;
  std::string format = "json";
  bool renormalize = false;
  CalibrationFlags flags;
  std::string out;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "evaluate", "Calibrate on a validation dump and evaluate every test dump");
    cmd->add_option("--validation", validation)->required();
    cmd->add_option("--validation-labels", validation_labels)->required();
    cmd->add_option("--validation-variances", validation_variances);
    cmd->add_option("--test", tests, "Test dump; repeatable")->required();
    cmd->add_option("--test-labels", test_labels, "One per --test")->required();
    cmd->add_option("--test-variances", test_variances, "One per --test, for mean-var");
    cmd->add_option("--quantifier", quantifiers)->required()->delimiter(',');
    cmd->add_option("--epsilon", epsilons)->required()->delimiter(',');
    cmd->add_option("--beta", betas)->delimiter(',')->capture_default_str();
    cmd->add_option("--bounds", bounds, "lower,upper objective bounds for regression")
        ->delimiter(',')
        ->expected(2);
    cmd->add_option("--samples", samples, "Use only the first k samples");
    cmd->add_option("--subject", subject, "Defaults to the manifest dataset tag");
    cmd->add_option("--technique", technique, "Defaults to the manifest technique tag");
    cmd->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_flag("--renormalize", renormalize, "Rescale softmax rows that drift from 1");
    cmd->add_option("--out", out)->required();
    flags.attach(cmd);
  }

  ConfigKey key_for(const Dump& d, Quantifier q) const {
    ConfigKey key;
    key.quantifier = q;
    key.subject = subject.value_or(d.manifest ? d.manifest->dataset_tag : d.stem);
    key.technique = technique.value_or(d.manifest ? d.manifest->technique_tag : "default");
    if (d.manifest) {
      key.distribution = d.manifest->distribution;
      key.epoch = d.manifest->epoch;
      key.dropout_rate = d.manifest->dropout_rate;
    }
    if (!is_point_quantifier(q)) {
      key.sample_count = static_cast<std::int64_t>(samples.value_or(d.tensor.samples()));
    }
    return key;
  }

  void execute(Outputs& outputs) const {
    if (test_labels.size() != tests.size()) {
      throw Error(ErrorCode::kLengthMismatch, "need one --test-labels per --test");
    }
    if (!test_variances.empty() && test_variances.size() != tests.size()) {
      throw Error(ErrorCode::kLengthMismatch, "need one --test-variances per --test");
    }
    const auto val = load_dump(validation, validation_labels,
                               validation_variances ? std::optional<fs::path>(*validation_variances)
                                                    : std::nullopt,
                               renormalize);
    std::vector<Dump> dumps;
    for (std::size_t i = 0; i < tests.size(); ++i) {
      std::optional<fs::path> var;
      if (!test_variances.empty()) var = test_variances[i];
      dumps.push_back(load_dump(tests[i], test_labels[i], var, renormalize));
    }

    auto options = flags.options();
    options.evaluation.betas = betas;
    const bool regression = !val.tensor.is_classifier();
    if (regression) options.evaluation.objective = Objective::kMse;

    std::vector<ReportRow> rows;
    for (Quantifier q : parse_quantifiers(quantifiers)) {
      const auto val_set = assess(val, q, samples);
      auto q_options = options;
      if (regression) {
        if (!bounds.empty()) {
          q_options.evaluation.bounds = {bounds[0], bounds[1], Direction::kLowerBetter};
        } else {
          std::vector<double> errors;
          for (std::size_t i = 0; i < val_set.size(); ++i) {
            const double e = val_set.items[i].predicted - val.labels.value(i);
            errors.push_back(e * e);
          }
          q_options.evaluation.bounds = estimate_bounds(errors);
        }
      }
      for (const auto& d : dumps) {
        const auto test_set = assess(d, q, samples);
        for (double eps : epsilons) {
          auto result =
              calibrate_and_evaluate(val_set, val.labels, test_set, d.labels, eps, q_options);
          ConfigKey key = key_for(d, q);
          key.epsilon = eps;
          rows.push_back({key, result.threshold, result.report});
        }
      }
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ReportRow& a, const ReportRow& b) { return a.key < b.key; });
    outputs.add(out, format == "csv" ? format_reports_csv(rows) : format_reports_json(rows));
  }
};

// ---------------------------------------------------------------- rank

struct RankCommand {
  std::vector<std::string> reports;
  std::vector<std::string> group{"subject", "distribution", "epsilon"};
  std::vector<std::string> competitor{"quantifier"};
  std::string metric = "s_1";
  std::string out_dir = ".";

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("rank", "Mean rank of competitors over groups of reports");
    cmd->add_option("--reports", reports, "Report CSVs from evaluate")->required();
    cmd->add_option("--group", group, "Key axes that form a group")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--competitor", competitor, "Key axes that name a competitor")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--metric", metric, "Higher-is-better report column")->capture_default_str();
    cmd->add_option("--out-dir", out_dir)->capture_default_str();
  }

  void execute(Outputs& outputs) const {
    const auto records = read_reports(reports);
    const auto g = parse_axes(group);
    const auto c = parse_axes(competitor);
    const auto table = rank_reports(records, g, c, metric);

    std::string csv = "group";
    for (const auto& name : table.competitors) csv += "," + name;
    csv += "\n";
    std::vector<LongRow> lrows;
    for (const auto& gr : table.groups) {
      csv += gr.group;
      for (std::size_t i = 0; i < gr.ranks.size(); ++i) {
        csv += "," + format_number(gr.ranks[i]);
        lrows.push_back({table.competitors[i], gr.group, gr.ranks[i], "rank"});
      }
      csv += "\n";
    }
    csv += "mean";
    for (std::size_t i = 0; i < table.mean_ranks.size(); ++i) {
      csv += "," + format_number(table.mean_ranks[i]);
      lrows.push_back({table.competitors[i], "mean", table.mean_ranks[i], "mean_rank"});
    }
    csv += "\n";
    outputs.add(fs::path(out_dir) / "rank_table.csv", std::move(csv));
    outputs.add(fs::path(out_dir) / "rank_long.csv", format_long(lrows));
  }
};

// ---------------------------------------------------------------- sample-size

struct SampleSizeCommand {
  std::string validation;
  std::string validation_labels;
  std::string test;
  std::string test_labels;
  std::string quantifier = "ms";
  double epsilon = 0.1;
  std::size_t k_min = 2;
  std::optional<std::size_t> k_max;
  bool renormalize = false;
  CalibrationFlags flags;
  std::string out_dir = ".";

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("sample-size", "Supervised objective as a function of k");
    cmd->add_option("--validation", validation)->required();
    cmd->add_option("--validation-labels", validation_labels)->required();
    cmd->add_option("--test", test)->required();
    cmd->add_option("--test-labels", test_labels)->required();
    cmd->add_option("--quantifier", quantifier)->capture_default_str();
    cmd->add_option("--epsilon", epsilon)->capture_default_str();
    cmd->add_option("--k-min", k_min)->capture_default_str();
    cmd->add_option("--k-max", k_max, "Defaults to all samples");
    cmd->add_flag("--renormalize", renormalize, "Rescale softmax rows that drift from 1");
    cmd->add_option("--out-dir", out_dir)->capture_default_str();
    flags.attach(cmd);
  }

  void execute(Outputs& outputs) const {
    const auto val = load_dump(validation, validation_labels, std::nullopt, renormalize);
    const auto tst = load_dump(test, test_labels, std::nullopt, renormalize);
    const Quantifier q = parse_quantifier(quantifier);
    const auto curve =
        sample_size_curve(val.tensor, val.labels, tst.tensor, tst.labels, q, epsilon, k_min,
                          k_max.value_or(val.tensor.samples()), flags.options());
    std::string csv = "k,threshold,obj,obj_sup,acceptance_rate\n";
    std::vector<LongRow> lrows;
    const std::string series(to_string(q));
    for (const auto& p : curve) {
      const auto k = std::to_string(p.k);
      csv += k + "," + format_number(p.threshold) + "," + format_number(p.unsupervised_objective) +
             "," + optional_cell(p.supervised_objective) + "," +
             format_number(p.acceptance_rate) + "\n";
      lrows.push_back({k, "obj", p.unsupervised_objective, series});
      if (p.supervised_objective) lrows.push_back({k, "obj_sup", *p.supervised_objective, series});
      lrows.push_back({k, "acceptance_rate", p.acceptance_rate, series});
    }
    outputs.add(fs::path(out_dir) / "sample_size.csv", std::move(csv));
    outputs.add(fs::path(out_dir) / "sample_size_long.csv", format_long(lrows));
  }
};

// ---------------------------------------------------------------- sensitivity

struct SensitivityCommand {
  std::string grid;
  std::size_t window = 5;
  std::string out_dir = ".";

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("sensitivity",
                                   "Sliding-window mean and std maps over an epoch x k grid");
    cmd->add_option("--grid", grid, "CSV with columns epoch,sample_count,value")->required();
    cmd->add_option("--window", window)->capture_default_str();
    cmd->add_option("--out-dir", out_dir)->capture_default_str();
  }

  void execute(Outputs& outputs, std::ostream& log) const {
    const auto g = parse_grid_csv(read_text_file(grid));
    const auto maps = sensitivity_maps(g, window);
    std::vector<LongRow> lrows;
    append_long(lrows, g, "value");
    append_long(lrows, maps.mean, "mean");
    append_long(lrows, maps.std, "std");
    nlohmann::ordered_json summary;
    summary["window"] = maps.window;
    summary["interior_rows"] = maps.mean.rows();
    summary["interior_cols"] = maps.mean.cols();
    summary["s_c"] = maps.s_c ? nlohmann::ordered_json(*maps.s_c) : nlohmann::ordered_json();
    log << "s-c = " << (maps.s_c ? format_number(*maps.s_c) : std::string("undefined")) << "\n";
    outputs.add(fs::path(out_dir) / "sensitivity_mean.csv", format_matrix(maps.mean));
    outputs.add(fs::path(out_dir) / "sensitivity_std.csv", format_matrix(maps.std));
    outputs.add(fs::path(out_dir) / "sensitivity_long.csv", format_long(lrows));
    outputs.add(fs::path(out_dir) / "sensitivity.json", summary.dump(2) + "\n");
  }
};

// ---------------------------------------------------------------- dropout-summary

struct DropoutSummaryCommand {
  std::vector<std::string> reports;
  std::string metric = "avgpr";
  std::string out_dir = ".";

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("dropout-summary",
                                   "Mean and std of a metric per dropout rate");
    cmd->add_option("--reports", reports, "Report CSVs from evaluate")->required();
    cmd->add_option("--metric", metric)->capture_default_str();
    cmd->add_option("--out-dir", out_dir)->capture_default_str();
  }

  void execute(Outputs& outputs) const {
    std::vector<DropoutObservation> obs;
    for (const auto& r : read_reports(reports)) {
      if (!r.key.dropout_rate) {
        throw Error(ErrorCode::kInvalidArgument,
                    "report row for '" + r.key.subject + "' has no dropout_rate");
      }
      const auto v = r.metric(metric);
      if (!v) {
        throw Error(ErrorCode::kMissingCell,
                    "report row for '" + r.key.subject + "' has no " + metric);
      }
      obs.push_back({r.key.subject, r.key.quantifier, *r.key.dropout_rate, *v});
    }
    const auto rows = dropout_rate_summary(obs);
    std::string csv = "dropout_rate,subject,quantifier,repetitions,mean,std\n";
    std::vector<LongRow> lrows;
    for (const auto& row : rows) {
      const auto rate = format_number(row.dropout_rate);
      const auto series = row.subject + "/" + std::string(to_string(row.quantifier));
      csv += rate + "," + row.subject + "," + std::string(to_string(row.quantifier)) + "," +
             std::to_string(row.repetitions) + "," + format_number(row.mean_avgpr) + "," +
             format_number(row.std_avgpr) + "\n";
      lrows.push_back({rate, "mean_" + metric, row.mean_avgpr, series});
      lrows.push_back({rate, "std_" + metric, row.std_avgpr, series});
    }
    outputs.add(fs::path(out_dir) / "dropout_summary.csv", std::move(csv));
    outputs.add(fs::path(out_dir) / "dropout_long.csv", format_long(lrows));
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uncertainty-based supervisor evaluation", "uqsup"};
  app.require_subcommand(1);

  SynthCommand synth;
  QuantifyCommand quantify_cmd;
  CalibrateCommand calibrate;
  SuperviseCommand supervise_cmd;
  EvaluateCommand evaluate_cmd;
  RankCommand rank;
  SampleSizeCommand sample_size;
  SensitivityCommand sensitivity;
  DropoutSummaryCommand dropout;
  synth.attach(app);
  quantify_cmd.attach(app);
  calibrate.attach(app);
  supervise_cmd.attach(app);
  evaluate_cmd.attach(app);
  rank.attach(app);
  sample_size.attach(app);
  sensitivity.attach(app);
  dropout.attach(app);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  }

  try {
    Outputs outputs;
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "synth") synth.execute(outputs);
    else if (name == "quantify") quantify_cmd.execute(outputs);
    else if (name == "calibrate") calibrate.execute(outputs, out);
    else if (name == "supervise") supervise_cmd.execute(outputs, out);
    else if (name == "evaluate") evaluate_cmd.execute(outputs);
    else if (name == "rank") rank.execute(outputs);
    else if (name == "sample-size") sample_size.execute(outputs);
    else if (name == "sensitivity") sensitivity.execute(outputs, out);
    else if (name == "dropout-summary") dropout.execute(outputs);
    outputs.commit(out);
    return kExitOk;
  } catch (const Error& e) {
    err << "uqsup: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "uqsup: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace uqsup::cli
