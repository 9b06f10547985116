#include "uqsup/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "uqsup/error.hpp"
#include "uqsup/pipeline.hpp"
#include "uqsup/synthgen.hpp"

namespace uqsup {
namespace {

using test::expect_error;

TEST(FractionalRanks, Examples) {
  EXPECT_EQ(fractional_ranks(std::vector<double>{0.9, 0.8, 0.7}), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(fractional_ranks(std::vector<double>{0.9, 0.9, 0.7}), (std::vector<double>{1.5, 1.5, 3}));
  EXPECT_EQ(fractional_ranks(std::vector<double>{0.1, 0.5, 0.5, 0.5}),
            (std::vector<double>{4, 2, 2, 2}));
}

TEST(RankTable, TwoReversedGroups) {
  std::vector<RankObservation> obs{
      {"g1", "a", 0.9}, {"g1", "b", 0.8}, {"g2", "a", 0.1}, {"g2", "b", 0.7}};
  auto table = rank_table(obs);
  EXPECT_EQ(table.competitors, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(table.mean_ranks, (std::vector<double>{1.5, 1.5}));
  EXPECT_EQ(table.group_count(), 2u);
}

TEST(RankTable, Errors) {
  std::vector<RankObservation> missing{{"g1", "a", 0.9}, {"g1", "b", 0.8}, {"g2", "a", 0.1}};
  expect_error(ErrorCode::kMissingCompetitor, [&] { rank_table(missing); }, "lacks competitor 'b'");
  std::vector<RankObservation> dup{{"g1", "a", 0.9}, {"g1", "a", 0.8}};
  expect_error(ErrorCode::kDuplicateEntry, [&] { rank_table(dup); });
  expect_error(ErrorCode::kEmptyInput, [] { rank_table({}); });
}

TEST(RankTable, RankSumsAndRange) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng() % 6;
    const std::size_t groups = 1 + rng() % 8;
    std::vector<RankObservation> obs;
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t c = 0; c < k; ++c) {
        obs.push_back({"g" + std::to_string(g), "c" + std::to_string(c),
                       static_cast<double>(rng() % 4) / 4.0});
      }
    }
    auto table = rank_table(obs);
    const double kd = static_cast<double>(k);
    for (const auto& g : table.groups) {
      double sum = 0.0;
      for (double r : g.ranks) sum += r;
      EXPECT_EQ(sum, kd * (kd + 1) / 2);
    }
    for (double m : table.mean_ranks) {
      EXPECT_GE(m, 1.0);
      EXPECT_LE(m, kd);
    }
  }
}

TEST(RankReports, GroupsByAxes) {
  std::vector<ReportRecord> records;
  const auto add = [&](double eps, Quantifier q, double s1) {
    ReportRecord r;
    r.key.subject = "mnist";
    r.key.technique = "mc-dropout";
    r.key.quantifier = q;
    r.key.epsilon = eps;
    r.metrics["s_1"] = s1;
    records.push_back(r);
  };
  add(0.01, Quantifier::kVariationRatio, 0.9);
  add(0.01, Quantifier::kMeanSoftmax, 0.8);
  add(0.1, Quantifier::kVariationRatio, 0.7);
  add(0.1, Quantifier::kMeanSoftmax, 0.7);
  const KeyAxis group[] = {KeyAxis::kSubject, KeyAxis::kEpsilon};
  const KeyAxis competitor[] = {KeyAxis::kTechnique, KeyAxis::kQuantifier};
  auto table = rank_reports(records, group, competitor);
  EXPECT_EQ(table.competitors, (std::vector<std::string>{"mc-dropout/ms", "mc-dropout/vr"}));
  EXPECT_EQ(table.mean_ranks, (std::vector<double>{1.75, 1.25}));
  EXPECT_EQ(table.groups[0].group, "mnist/0.01");

  records[0].metrics["s_1"] = std::nullopt;
  expect_error(ErrorCode::kMissingCell, [&] { rank_reports(records, group, competitor); });
  EXPECT_EQ(parse_key_axis("sample_count"), KeyAxis::kSampleCount);
  expect_error(ErrorCode::kInvalidArgument, [] { parse_key_axis("colour"); });
}

AnalysisGrid grid_from(std::size_t rows, std::size_t cols, const std::function<double(std::size_t, std::size_t)>& f) {
  std::vector<double> rk(rows), ck(cols);
  for (std::size_t r = 0; r < rows; ++r) rk[r] = static_cast<double>(r + 1);
  for (std::size_t c = 0; c < cols; ++c) ck[c] = static_cast<double>(2 * (c + 1));
  AnalysisGrid g(rk, ck);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) g.at(r, c) = f(r, c);
  }
  return g;
}

TEST(Sensitivity, SingleOutlier) {
  auto g = grid_from(5, 5, [](std::size_t r, std::size_t c) { return r == 2 && c == 2 ? 25.0 : 0.0; });
  auto maps = sensitivity_maps(g);
  ASSERT_EQ(maps.mean.rows(), 1u);
  ASSERT_EQ(maps.mean.cols(), 1u);
  EXPECT_EQ(*maps.mean.at(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(*maps.std.at(0, 0), std::sqrt(24.0));
  EXPECT_EQ(maps.mean.row_keys(), (std::vector<double>{3.0}));
  EXPECT_EQ(maps.mean.col_keys(), (std::vector<double>{6.0}));
  EXPECT_FALSE(maps.s_c);
}

TEST(Sensitivity, ConstantGrid) {
  auto maps = sensitivity_maps(grid_from(8, 9, [](auto, auto) { return 0.37; }));
  EXPECT_EQ(maps.std.rows(), 4u);
  EXPECT_EQ(maps.std.cols(), 5u);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {
      EXPECT_EQ(*maps.std.at(r, c), 0.0);
      EXPECT_EQ(*maps.mean.at(r, c), 0.37);
    }
  }
  EXPECT_FALSE(maps.s_c);
}

TEST(Sensitivity, AffineTransform) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  std::vector<double> base(12 * 10);
  for (double& v : base) v = normal(rng);
  auto g = grid_from(12, 10, [&](std::size_t r, std::size_t c) { return base[r * 10 + c]; });
  auto h = grid_from(12, 10, [&](std::size_t r, std::size_t c) { return 3.5 * base[r * 10 + c] + 2.0; });
  auto mg = sensitivity_maps(g);
  auto mh = sensitivity_maps(h);
  for (std::size_t r = 0; r < mg.std.rows(); ++r) {
    for (std::size_t c = 0; c < mg.std.cols(); ++c) {
      EXPECT_NEAR(*mh.std.at(r, c), 3.5 * *mg.std.at(r, c), 1e-12);
    }
  }
  EXPECT_NEAR(*mh.s_c, *mg.s_c, 1e-12);
}

TEST(Sensitivity, Errors) {
  expect_error(ErrorCode::kGridTooSmall, [] { sensitivity_maps(grid_from(4, 9, [](auto, auto) { return 1.0; })); });
  auto holey = grid_from(6, 6, [](auto, auto) { return 1.0; });
  holey.at(3, 3).reset();
  expect_error(ErrorCode::kMissingCell, [&] { sensitivity_maps(holey); });
  expect_error(ErrorCode::kInvalidArgument,
               [] { sensitivity_maps(grid_from(6, 6, [](auto, auto) { return 1.0; }), 4); });
}

TEST(Sensitivity, GridCsv) {
  auto g = parse_grid_csv("epoch,sample_count,value\n2,10,0.5\n1,10,0.4\n1,20,0.45\n");
  EXPECT_EQ(g.row_keys(), (std::vector<double>{1, 2}));
  EXPECT_EQ(g.col_keys(), (std::vector<double>{10, 20}));
  EXPECT_EQ(*g.at(1, 0), 0.5);
  EXPECT_FALSE(g.at(1, 1));
  expect_error(ErrorCode::kDuplicateEntry,
               [] { parse_grid_csv("epoch,sample_count,value\n1,1,0\n1,1,0\n"); });
  expect_error(ErrorCode::kInvalidArgument, [] { parse_grid_csv("a,b,c\n"); });
}

TEST(DropoutSummary, Examples) {
  std::vector<DropoutObservation> obs{
      {"mnist", Quantifier::kVariationRatio, 0.3, 0.4},
      {"mnist", Quantifier::kVariationRatio, 0.1, 0.8},
      {"mnist", Quantifier::kVariationRatio, 0.1, 0.9},
  };
  auto rows = dropout_rate_summary(obs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].dropout_rate, 0.1);
  EXPECT_DOUBLE_EQ(rows[0].mean_avgpr, 0.85);
  EXPECT_NEAR(rows[0].std_avgpr, 0.05, 1e-15);
  EXPECT_EQ(rows[0].repetitions, 2u);
  EXPECT_EQ(rows[1].dropout_rate, 0.3);
  EXPECT_EQ(rows[1].mean_avgpr, 0.4);
  EXPECT_EQ(rows[1].std_avgpr, 0.0);
  expect_error(ErrorCode::kEmptyInput, [] { dropout_rate_summary({}); });
}

class SampleSizeCurve : public ::testing::Test {
 protected:
  void SetUp() override {
    GeneratorConfig cfg;
    cfg.inputs = 600;
    cfg.samples = 10;
    cfg.mislabel_link = 0.8;
    cfg.seed = 1;
    val_ = generate(cfg);
    cfg.seed = 2;
    test_ = generate(cfg);
  }
  SyntheticSet val_;
  SyntheticSet test_;
};

TEST_F(SampleSizeCurve, LastPointEqualsFullEvaluation) {
  auto curve = sample_size_curve(val_.tensor, val_.labels, test_.tensor, test_.labels,
                                 Quantifier::kPredictiveEntropy, 0.1, 2, 10);
  ASSERT_EQ(curve.size(), 9u);
  EXPECT_EQ(curve.front().k, 2u);
  auto full = calibrate_and_evaluate(predictive_entropy(val_.tensor), val_.labels,
                                     predictive_entropy(test_.tensor), test_.labels, 0.1);
  EXPECT_EQ(curve.back().threshold, full.threshold.t);
  EXPECT_EQ(curve.back().supervised_objective, full.report.supervised_objective);
  EXPECT_EQ(curve.back().acceptance_rate, full.report.acceptance_rate);
  EXPECT_EQ(curve.back().unsupervised_objective, full.report.unsupervised_objective);
}

TEST_F(SampleSizeCurve, IdenticalSamplesGiveAFlatCurve) {
  GeneratorConfig cfg;
  cfg.inputs = 300;
  cfg.samples = 6;
  cfg.noise_scale = 0.0;
  cfg.seed = 3;
  auto val = generate(cfg);
  cfg.seed = 4;
  auto tst = generate(cfg);
  auto curve = sample_size_curve(val.tensor, val.labels, tst.tensor, tst.labels,
                                 Quantifier::kMeanSoftmax, 0.1, 2, 6);
  for (const auto& p : curve) {
    EXPECT_EQ(p.supervised_objective, curve.front().supervised_objective);
    EXPECT_EQ(p.acceptance_rate, curve.front().acceptance_rate);
  }
}

TEST_F(SampleSizeCurve, Errors) {
  expect_error(ErrorCode::kInvalidSamplePrefix, [&] {
    sample_size_curve(val_.tensor, val_.labels, test_.tensor, test_.labels,
                      Quantifier::kVariationRatio, 0.1, 1, 5);
  });
  expect_error(ErrorCode::kInvalidSamplePrefix, [&] {
    sample_size_curve(val_.tensor, val_.labels, test_.tensor, test_.labels,
                      Quantifier::kVariationRatio, 0.1, 2, 11);
  });
  expect_error(ErrorCode::kInvalidArgument, [&] {
    sample_size_curve(val_.tensor, val_.labels, test_.tensor, test_.labels,
                      Quantifier::kMaxSoftmax, 0.1, 2, 5);
  });
}

}  // namespace
}  // namespace uqsup
