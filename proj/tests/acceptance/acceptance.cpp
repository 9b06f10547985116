// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "properties.hpp"
#include "uqsup/analysis.hpp"
#include "uqsup/metrics.hpp"
#include "uqsup/oracles.hpp"
#include "uqsup/pipeline.hpp"
#include "uqsup/quantifiers.hpp"
#include "uqsup/supervisor.hpp"
#include "uqsup/synthgen.hpp"

namespace uqsup {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

// ------------------------------------------------------------------ S1

struct PublishedCell {
  const char* cell;
  double accuracy;
  double delta;
  double s1;
};

// Supervised accuracy, acceptance rate and S1 as printed (two decimals).
constexpr PublishedCell kPublished[] = {
    {"cifar10/point/sm/nominal/0.01", 0.83, 0.98, 0.90},
    {"cifar10/point/sm/nominal/0.1", 0.89, 0.83, 0.86},
    {"cifar10/ensemble/vr/nominal/0.01", 0.88, 0.97, 0.92},
    {"cifar10/ensemble/vr/nominal/0.1", 0.94, 0.83, 0.88},
    {"cifar10/flipout/vr/nominal/0.01", 0.71, 0.98, 0.82},
    {"mnist/point/sm/ood/0.1", 0.96, 0.49, 0.65},
    {"mnist/point/pcs/ood/0.1", 0.96, 0.50, 0.66},
    {"mnist/mc-dropout/mi/ood/0.1", 0.92, 0.56, 0.70},
    {"traffic/point/sm/nominal/0.1", 0.96, 0.74, 0.84},
    {"traffic/ensemble/vr/nominal/0.1", 0.97, 0.77, 0.86},
    {"traffic/ensemble/vr/nominal/0.01", 0.94, 0.84, 0.89},
    {"imagenet/point/sm/ood/0.01", 0.61, 0.79, 0.69},
    {"imagenet/point/sm/nominal/0.01", 0.77, 0.95, 0.85},
};

Outcome s1_reproduction() {
  double worst = 0.0;
  std::string worst_cell;
  for (const auto& c : kPublished) {
    const double diff = std::abs(s_score(c.accuracy, c.delta, accuracy_bounds(), 1.0) - c.s1);
    if (diff > worst) {
      worst = diff;
      worst_cell = c.cell;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu cells, max |diff| %.5f at %s", std::size(kPublished), worst,
                worst_cell.c_str());
  return {worst <= 0.005 && std::size(kPublished) >= 10, buf};
}

// ------------------------------------------------------------- oracles

Outcome oracle_equivalence() {
  std::mt19937_64 rng(20240611);
  for (int i = 0; i < 1000; ++i) {
    auto violation = test::check_oracle_agreement(test::random_instance(rng));
    if (violation) return {false, "instance " + std::to_string(i) + ": " + *violation};
  }
  return {true, "1000 instances, exact"};
}

// ---------------------------------------------------------- quantifiers

Outcome quantifier_invariants() {
  std::mt19937_64 rng(777);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 1 + rng() % 32;
    const std::size_t t = 1 + rng() % 16;
    const std::size_t c = 2 + rng() % 9;
    auto tensor = test::random_softmax_tensor(rng, n, t, c);
    auto violation = test::check_quantifier_invariants(tensor, rng, 1e-9);
    if (violation) return {false, "tensor " + std::to_string(i) + ": " + *violation};
  }
  return {true, "10000 tensors, tol 1e-9"};
}

// ---------------------------------------------------------- calibration

// Scan every distinct value and +inf; keep the lowest FPR that reaches eps.
std::pair<double, double> brute_force_calibration(const std::vector<double>& u, double eps) {
  double best_t = INFINITY;
  double best_fpr = 2.0;
  for (double t : u) {
    std::size_t rejected = 0;
    for (double v : u) rejected += v >= t;
    const double fpr = static_cast<double>(rejected) / static_cast<double>(u.size());
    if (fpr >= eps && (fpr < best_fpr || (fpr == best_fpr && t > best_t))) {
      best_fpr = fpr;
      best_t = t;
    }
  }
  return {best_t, best_fpr};
}

Outcome calibration_contract() {
  std::mt19937_64 rng(31337);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng() % (i % 2 == 0 ? oracle::kMaxInstance : 400);
    const bool ties = rng() % 2 == 0;
    std::vector<double> u(n);
    for (double& v : u) v = ties ? static_cast<double>(rng() % 8) : normal(rng);
    for (double eps : {0.01, 0.05, 0.1}) {
      const auto got = calibrate_threshold(u, eps);
      const auto [t, fpr] = brute_force_calibration(u, eps);
      bool ok = got.threshold == t && got.realized_fpr == fpr && got.realized_fpr >= eps;
      if (ok && n <= oracle::kMaxInstance) {
        const auto ref = oracle::calibrate(u, eps);
        ok = ref.threshold == got.threshold && ref.realized_fpr == got.realized_fpr;
      }
      if (!ok) {
        return {false, "array " + std::to_string(i) + " (n=" + std::to_string(n) +
                           ") eps=" + std::to_string(eps)};
      }
    }
  }
  return {true, "1000 arrays x eps {0.01, 0.05, 0.1}"};
}

// ---------------------------------------------------- synthetic pipeline

GeneratorConfig surrogate_config(std::uint64_t seed, std::size_t samples) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.inputs = 5000;
  cfg.samples = samples;
  cfg.classes = 10;
  cfg.mislabel_link = 0.8;
  return cfg;
}

constexpr std::uint64_t kValidationSeed = 1001;
constexpr std::uint64_t kTestSeed = 2002;

Outcome rq1_surrogate() {
  const auto val = generate(surrogate_config(kValidationSeed, 20));
  const auto tst = generate(surrogate_config(kTestSeed, 20));
  std::string detail;
  bool pass = true;
  for (Quantifier q : {Quantifier::kVariationRatio, Quantifier::kPredictiveEntropy,
                       Quantifier::kMutualInformation, Quantifier::kMeanSoftmax}) {
    const auto r = calibrate_and_evaluate(quantify(val.tensor, {q}), val.labels,
                                          quantify(tst.tensor, {q}), tst.labels, 0.1)
                       .report;
    const double sup = r.supervised_objective.value_or(0.0);
    const double gain = sup - r.unsupervised_objective;
    pass = pass && r.supervised_objective && gain >= 0.02 && r.acceptance_rate >= 0.5;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s%s gain %.4f delta %.4f", detail.empty() ? "" : "; ",
                  std::string(to_string(q)).c_str(), gain, r.acceptance_rate);
    detail += buf;
  }
  return {pass, detail};
}

Outcome rq3_surrogate() {
  const auto val = generate(surrogate_config(kValidationSeed, 100));
  const auto tst = generate(surrogate_config(kTestSeed, 100));
  const auto curve = sample_size_curve(val.tensor, val.labels, tst.tensor, tst.labels,
                                       Quantifier::kMeanSoftmax, 0.1, 20, 100);
  const double reference = curve.back().supervised_objective.value_or(NAN);
  double worst = 0.0;
  std::size_t worst_k = 0;
  for (const auto& p : curve) {
    const double diff = std::abs(p.supervised_objective.value_or(NAN) - reference);
    if (!(diff <= worst)) {
      worst = diff;
      worst_k = p.k;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |obj(k) - obj(100)| = %.4f at k=%zu", worst, worst_k);
  return {worst < 0.01, buf};
}

// ---------------------------------------------------------- sensitivity

// Row r = epoch, column c = sample count. The level rises with r + c; the
// checkerboard wiggle shrinks as the level rises.
double sensitivity_fixture(std::size_t r, std::size_t c) {
  const double level = 0.5 + 0.0125 * static_cast<double>(r + c);
  const double amplitude = 0.1 * (1.0 - level) * (1.0 - level);
  const double sign = (r + c) % 2 == 0 ? 1.0 : -1.0;
  const double jitter = 1.0 + 0.25 * static_cast<double>((r * 7 + c * 3) % 5);
  return level + sign * amplitude * jitter;
}

Outcome sensitivity_machinery() {
  std::vector<double> keys(20);
  for (std::size_t i = 0; i < 20; ++i) keys[i] = static_cast<double>(i + 1);
  AnalysisGrid grid(keys, keys);
  for (std::size_t r = 0; r < 20; ++r) {
    for (std::size_t c = 0; c < 20; ++c) grid.at(r, c) = sensitivity_fixture(r, c);
  }
  const auto maps = sensitivity_maps(grid, 5);
  if (!maps.s_c || !(*maps.s_c < -0.5)) return {false, "s-c not below -0.5"};

  // Centres (2,2), (9,11), (17,17): direct 25-value mean and population std.
  const std::pair<std::size_t, std::size_t> centres[] = {{2, 2}, {9, 11}, {17, 17}};
  double worst = 0.0;
  for (const auto& [cr, cc] : centres) {
    long double sum = 0.0L;
    for (std::size_t r = cr - 2; r <= cr + 2; ++r) {
      for (std::size_t c = cc - 2; c <= cc + 2; ++c) sum += sensitivity_fixture(r, c);
    }
    const long double mean = sum / 25.0L;
    long double ss = 0.0L;
    for (std::size_t r = cr - 2; r <= cr + 2; ++r) {
      for (std::size_t c = cc - 2; c <= cc + 2; ++c) {
        const long double d = sensitivity_fixture(r, c) - mean;
        ss += d * d;
      }
    }
    const double sd = static_cast<double>(std::sqrt(ss / 25.0L));
    worst = std::max(worst, std::abs(*maps.mean.at(cr - 2, cc - 2) - static_cast<double>(mean)));
    worst = std::max(worst, std::abs(*maps.std.at(cr - 2, cc - 2) - sd));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "s-c %.4f, max cell error %.2e", *maps.s_c, worst);
  return {worst <= 1e-12, buf};
}

// ----------------------------------------------------------------- rank

Outcome rank_machinery() {
  // Scores per group for competitors a, b, c. Group g4 ties a and b.
  const double scores[6][3] = {
      {0.90, 0.80, 0.70},  // ranks 1 2 3
      {0.60, 0.85, 0.70},  // 3 1 2
      {0.75, 0.70, 0.80},  // 2 3 1
      {0.88, 0.88, 0.50},  // 1.5 1.5 3
      {0.91, 0.40, 0.60},  // 1 3 2
      {0.30, 0.95, 0.20},  // 2 1 3
  };
  std::vector<RankObservation> obs;
  const char* names[] = {"a", "b", "c"};
  for (int g = 0; g < 6; ++g) {
    for (int c = 0; c < 3; ++c) obs.push_back({"g" + std::to_string(g), names[c], scores[g][c]});
  }
  const auto table = rank_table(obs);
  // a: 1+3+2+1.5+1+2 = 10.5; b: 2+1+3+1.5+3+1 = 11.5; c: 3+2+1+3+2+3 = 14.
  const std::vector<double> expected{10.5 / 6.0, 11.5 / 6.0, 14.0 / 6.0};
  const std::vector<double> tie_group{1.5, 1.5, 3.0};
  const bool pass = table.competitors == std::vector<std::string>{"a", "b", "c"} &&
                    table.mean_ranks == expected && table.group_count() == 6 &&
                    table.groups[3].ranks == tie_group;
  char buf[128];
  std::snprintf(buf, sizeof buf, "mean ranks %.6f %.6f %.6f over %zu groups", table.mean_ranks[0],
                table.mean_ranks[1], table.mean_ranks[2], table.group_count());
  return {pass, buf};
}

}  // namespace
}  // namespace uqsup

int main() {
  using namespace uqsup;
  const Criterion criteria[] = {
      {"s1-reproduction", 1.0, s1_reproduction},
      {"oracle-equivalence", 10.0, oracle_equivalence},
      {"quantifier-invariants", 30.0, quantifier_invariants},
      {"calibration-contract", 5.0, calibration_contract},
      {"rq1-surrogate", 30.0, rq1_surrogate},
      {"rq3-surrogate", 120.0, rq3_surrogate},
      {"sensitivity-machinery", 1.0, sensitivity_machinery},
      {"rank-machinery", 1.0, rank_machinery},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.time_limit_s;
    const bool pass = outcome.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s %-22s %.3fs (limit %.0fs)  %s%s\n", pass ? "PASS" : "FAIL", c.name.c_str(),
                seconds, c.time_limit_s, outcome.detail.c_str(), in_time ? "" : "  [too slow]");
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
