#pragma once

// Property checks shared by the unit tests and the acceptance binary. Each
// check returns a description of the first violation, or nullopt.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "uqsup/metrics.hpp"
#include "uqsup/oracles.hpp"
#include "uqsup/quantifiers.hpp"
#include "uqsup/supervisor.hpp"
#include "uqsup/tensor_io.hpp"

namespace uqsup::test {

using Violation = std::optional<std::string>;

// Random softmax rows from Gaussian logits with a random temperature; about
// one row in eight is one-hot and one in sixteen uniform, so ties and zeros
// get exercised.
template <typename Rng>
SampleTensor random_softmax_tensor(Rng& rng, std::size_t n, std::size_t t, std::size_t c) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 6.0);
  std::vector<float> values(n * t * c);
  std::vector<double> logits(c);
  for (std::size_t r = 0; r < n * t; ++r) {
    float* row = values.data() + r * c;
    const auto kind = rng() % 16;
    if (kind < 2) {
      const std::size_t hot = rng() % c;
      for (std::size_t k = 0; k < c; ++k) row[k] = k == hot ? 1.0f : 0.0f;
      continue;
    }
    if (kind == 2) {
      for (std::size_t k = 0; k < c; ++k) row[k] = static_cast<float>(1.0 / static_cast<double>(c));
      continue;
    }
    const double s = scale(rng);
    double hi = -INFINITY;
    for (double& z : logits) {
      z = s * normal(rng);
      hi = std::max(hi, z);
    }
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - hi);
    for (std::size_t k = 0; k < c; ++k) row[k] = static_cast<float>(std::exp(logits[k] - hi) / sum);
  }
  return SampleTensor::classifier(n, t, c, std::move(values));
}

inline std::string describe(std::string_view what, std::size_t input, double value) {
  std::ostringstream out;
  out.precision(17);
  out << what << " at input " << input << ": " << value;
  return out.str();
}

// Same inputs with the sample axis of every input permuted independently.
template <typename Rng>
SampleTensor permute_samples(const SampleTensor& tensor, Rng& rng) {
  const std::size_t n = tensor.inputs();
  const std::size_t t_count = tensor.samples();
  const std::size_t width = tensor.row_width();
  std::vector<float> values(tensor.values().size());
  std::vector<std::size_t> order(t_count);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t t = 0; t < t_count; ++t) {
      const auto src = tensor.row(i, order[t]);
      std::copy(src.begin(), src.end(), values.begin() + (i * t_count + t) * width);
    }
  }
  return SampleTensor::from_raw(tensor.kind(), n, t_count, tensor.classes(), std::move(values));
}

// Every input's samples replaced by copies of its sample 0.
inline SampleTensor replicate_first_sample(const SampleTensor& tensor) {
  const std::size_t n = tensor.inputs();
  const std::size_t t_count = tensor.samples();
  const std::size_t width = tensor.row_width();
  std::vector<float> values(tensor.values().size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = tensor.row(i, 0);
    for (std::size_t t = 0; t < t_count; ++t) {
      std::copy(src.begin(), src.end(), values.begin() + (i * t_count + t) * width);
    }
  }
  return SampleTensor::from_raw(tensor.kind(), n, t_count, tensor.classes(), std::move(values));
}

inline std::vector<double> mean_row(const SampleTensor& tensor, std::size_t i) {
  std::vector<double> mean(tensor.classes(), 0.0);
  for (std::size_t t = 0; t < tensor.samples(); ++t) {
    const auto row = tensor.row(i, t);
    for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
  }
  for (double& m : mean) m /= static_cast<double>(tensor.samples());
  return mean;
}

// Bounds, permutation invariance and degenerate agreement on one classifier
// tensor. Sampling checks run only when T >= 2.
template <typename Rng>
Violation check_quantifier_invariants(const SampleTensor& tensor, Rng& rng, double tol) {
  const std::size_t n = tensor.inputs();
  const std::size_t t_count = tensor.samples();
  const double c = static_cast<double>(tensor.classes());
  const double ln_c = std::log(c);

  const auto sm = max_softmax(tensor, 1);
  const auto pc = pcs(tensor, 1);
  const auto sme = softmax_entropy(tensor, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double conf = -sm.items[i].uncertainty;
    if (conf < 1.0 / c - tol || conf > 1.0 + tol) return describe("SM out of [1/C,1]", i, conf);
    const double margin = -pc.items[i].uncertainty;
    if (margin < -tol || margin > 1.0 + tol) return describe("PCS out of [0,1]", i, margin);
    const double h = sme.items[i].uncertainty;
    if (h < -tol || h > ln_c + tol) return describe("SME out of [0,ln C]", i, h);
  }
  if (t_count < 2) return std::nullopt;

  const double k = static_cast<double>(t_count);
  const auto ms = mean_softmax(tensor);
  const auto vr = variation_ratio(tensor);
  const auto pe = predictive_entropy(tensor);
  const auto mi = mutual_information(tensor);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = vr.items[i].uncertainty;
    if (v < 0.0 || v > (k - 1.0) / k + tol) return describe("VR out of [0,(k-1)/k]", i, v);
    if (std::abs(v * k - std::round(v * k)) > tol) return describe("VR not a multiple of 1/k", i, v);
    const double p = pe.items[i].uncertainty;
    const double m = mi.items[i].uncertainty;
    if (m < -tol) return describe("MI negative", i, m);
    if (m > p + tol) return describe("MI above PE", i, m - p);
    if (p > ln_c + tol) return describe("PE above ln C", i, p);
    const double conf = -ms.items[i].uncertainty;
    if (conf < 1.0 / c - tol || conf > 1.0 + tol) return describe("MS out of [1/C,1]", i, conf);
  }

  const auto shuffled = permute_samples(tensor, rng);
  const auto ms2 = mean_softmax(shuffled);
  const auto vr2 = variation_ratio(shuffled);
  const auto pe2 = predictive_entropy(shuffled);
  const auto mi2 = mutual_information(shuffled);
  for (std::size_t i = 0; i < n; ++i) {
    // Summation order may move the last bit, which can only flip the
    // prediction between classes whose means agree to within tol.
    const auto mean = mean_row(tensor, i);
    const auto same_class = [&](double a, double b) {
      return a == b || std::abs(mean[static_cast<std::size_t>(a)] -
                                mean[static_cast<std::size_t>(b)]) <= tol;
    };
    if (!same_class(ms.items[i].predicted, ms2.items[i].predicted)) {
      return describe("MS prediction changed under permutation", i, ms2.items[i].predicted);
    }
    if (vr.items[i].predicted != vr2.items[i].predicted ||
        vr.items[i].uncertainty != vr2.items[i].uncertainty) {
      return describe("VR changed under permutation", i, vr2.items[i].uncertainty);
    }
    const std::pair<const AssessmentSet*, const AssessmentSet*> pairs[] = {
        {&ms, &ms2}, {&pe, &pe2}, {&mi, &mi2}};
    for (const auto& [a, b] : pairs) {
      const double d = std::abs(a->items[i].uncertainty - b->items[i].uncertainty);
      if (d > tol) {
        return describe(std::string(to_string(a->quantifier)) + " changed under permutation", i, d);
      }
    }
  }

  const auto same = replicate_first_sample(tensor);
  const auto vr3 = variation_ratio(same);
  const auto pe3 = predictive_entropy(same);
  const auto mi3 = mutual_information(same);
  const auto ms3 = mean_softmax(same);
  for (std::size_t i = 0; i < n; ++i) {
    if (vr3.items[i].uncertainty != 0.0) return describe("VR of identical samples", i, vr3.items[i].uncertainty);
    if (std::abs(mi3.items[i].uncertainty) > tol) {
      return describe("MI of identical samples", i, mi3.items[i].uncertainty);
    }
    if (std::abs(pe3.items[i].uncertainty - sme.items[i].uncertainty) > tol) {
      return describe("PE != SME for identical samples", i, pe3.items[i].uncertainty);
    }
    if (ms3.items[i].predicted != sm.items[i].predicted) {
      return describe("MS prediction != SM prediction for identical samples", i,
                      ms3.items[i].predicted);
    }
  }
  return std::nullopt;
}

// Small instance with deliberate ties: values drawn from a grid of at most
// 2n levels, both classes present.
template <typename Rng>
oracle::Instance random_instance(Rng& rng, std::size_t max_size = oracle::kMaxInstance) {
  oracle::Instance inst;
  const std::size_t n = 2 + rng() % (max_size - 1);
  const std::size_t levels = 1 + rng() % (2 * n);
  std::normal_distribution<double> normal(0.0, 3.0);
  const bool continuous = rng() % 4 == 0;
  for (std::size_t i = 0; i < n; ++i) {
    inst.values.push_back(continuous ? normal(rng)
                                     : static_cast<double>(rng() % levels) * 0.125 - 0.5);
    inst.malicious.push_back(rng() % 2 == 0);
  }
  const std::size_t pos = rng() % n;
  const std::size_t neg = (pos + 1 + rng() % (n - 1)) % n;
  inst.malicious[pos] = true;
  inst.malicious[neg] = false;
  static constexpr double kEpsilons[] = {0.01, 0.05, 0.1, 0.25, 0.5, 0.9};
  inst.epsilon = kEpsilons[rng() % 6];
  return inst;
}

// Fast paths versus oracles, compared with ==.
inline Violation check_oracle_agreement(const oracle::Instance& inst) {
  const double ap = average_precision(inst.values, inst.malicious);
  const double ap_ref = oracle::average_precision(inst.values, inst.malicious);
  if (ap != ap_ref) return describe("AVGPR differs from oracle", inst.values.size(), ap - ap_ref);
  const double roc = auroc(inst.values, inst.malicious);
  const double roc_ref = oracle::auroc(inst.values, inst.malicious);
  if (roc != roc_ref) return describe("AUROC differs from oracle", inst.values.size(), roc - roc_ref);
  const auto cal = calibrate_threshold(inst.values, inst.epsilon);
  const auto cal_ref = oracle::calibrate(inst.values, inst.epsilon);
  if (cal.threshold != cal_ref.threshold || cal.realized_fpr != cal_ref.realized_fpr) {
    return describe("calibration differs from oracle", inst.values.size(),
                    cal.threshold - cal_ref.threshold);
  }
  return std::nullopt;
}

}  // namespace uqsup::test
