#pragma once

// Deterministic synthetic prediction dumps.
//
// PRNG: SplitMix64.
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
// uniform() = (next() >> 11) * 2^-53 in [0, 1).
// gaussian() = sum of 12 uniforms - 6 (Irwin-Hall approximation).
//
// Input i draws from its own stream seeded with mix(seed ^ mix(i + 1)), where
// mix is the SplitMix64 output function above applied to a value. Within an
// input the draw order is:
//   1. dominant class d = floor(uniform * C)
//   2. noise level u = uniform. Inputs with u >= kHardNoiseLevel are "hard"
//      and get s = noise_scale * u; easy inputs get s = noise_scale * u *
//      kEasyNoiseFactor, leaving a gap between the two populations
//   3. base logits: gaussian * 0.5 for each class c != d (ascending c); then
//      base[d] = logsumexp(base[c != d]) + kBaseMargin
//   4. two uniforms a, b for labelling: if the input is hard and
//      a < mislabel_link the label is (d + 1 + floor(b * (C - 1))) mod C,
//      otherwise d
//   5. for t = 0..T-1: logits = base + s * gaussian (one draw per class,
//      ascending c). Samples with t mod 3 != 2 are "anchored": the dominant
//      logit is raised to at least logsumexp(others) + ln 4 so p_d >= 0.8.
//      Rows are softmax-normalized in f64 and stored as f32.
//
// Anchoring keeps d the argmax of sample 0, the strict per-sample mode and the
// mean-softmax winner for every prefix, so with mislabel_link = 0 every
// quantifier predicts the label. Because each input owns its stream, a dump
// with T samples is exactly the T-prefix of a dump with more samples.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "uqsup/labels.hpp"
#include "uqsup/tensor_io.hpp"

namespace uqsup {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z);

  std::uint64_t next();
  double uniform();
  double gaussian();
  // floor(uniform() * n)
  std::size_t below(std::size_t n);

 private:
  std::uint64_t state_;
};

inline constexpr double kBaseMargin = 5.0;
inline constexpr double kHardNoiseLevel = 0.7;
inline constexpr double kEasyNoiseFactor = 0.45;

struct GeneratorConfig {
  std::uint64_t seed = 0;
  std::size_t inputs = 1000;
  std::size_t samples = 20;
  std::size_t classes = 10;
  double noise_scale = 8.0;
  // Probability that a hard input carries a wrong label.
  double mislabel_link = 0.0;
};

struct SyntheticSet {
  SampleTensor tensor;
  LabelVector labels;
  std::vector<double> noise;  // per-input s
  std::vector<std::int32_t> dominant;
};

SyntheticSet generate(const GeneratorConfig& config);

// Regression analogue: target y ~ 10 * gaussian, member means y + s * gaussian
// (stored per sample), member variances s^2 * (0.5 + uniform). Hard targets
// are shifted by 10 * noise_scale when the mislabel link fires.
struct SyntheticRegressionSet {
  SampleTensor means;
  SampleTensor variances;
  LabelVector targets;
  std::vector<double> noise;
};

SyntheticRegressionSet generate_regression(const GeneratorConfig& config);

}  // namespace uqsup
