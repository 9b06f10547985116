#include "uqsup/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uqsup/error.hpp"

namespace uqsup {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

SplitMix64 input_stream(std::uint64_t seed, std::size_t input) {
  return SplitMix64(SplitMix64::mix(seed ^ SplitMix64::mix(static_cast<std::uint64_t>(input) + 1)));
}

double logsumexp_except(const std::vector<double>& logits, std::size_t skip) {
  double hi = -INFINITY;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    if (c != skip) hi = std::max(hi, logits[c]);
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    if (c != skip) sum += std::exp(logits[c] - hi);
  }
  return hi + std::log(sum);
}

void softmax_into(const std::vector<double>& logits, float* out) {
  const double hi = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - hi);
  for (std::size_t c = 0; c < logits.size(); ++c) {
    out[c] = static_cast<float>(std::exp(logits[c] - hi) / sum);
  }
}

double noise_level(const GeneratorConfig& config, double u) {
  return config.noise_scale * u * (u < kHardNoiseLevel ? kEasyNoiseFactor : 1.0);
}

void check_config(const GeneratorConfig& config, bool classifier) {
  if (config.inputs == 0 || config.samples == 0 || (classifier && config.classes < 2)) {
    throw Error(ErrorCode::kInvalidShape, "generator needs n >= 1, t >= 1 and c >= 2");
  }
  if (!(config.noise_scale >= 0.0) || !std::isfinite(config.noise_scale)) {
    throw Error(ErrorCode::kInvalidArgument, "noise scale must be finite and >= 0");
  }
  if (!(config.mislabel_link >= 0.0 && config.mislabel_link <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mislabel link must lie in [0,1]");
  }
}

}  // namespace

std::uint64_t SplitMix64::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() {
  state_ += kGolden;
  return mix(state_);
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::gaussian() {
  double sum = 0.0;
  for (int i = 0; i < 12; ++i) sum += uniform();
  return sum - 6.0;
}

std::size_t SplitMix64::below(std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

SyntheticSet generate(const GeneratorConfig& config) {
  check_config(config, true);
  const std::size_t n = config.inputs;
  const std::size_t t_count = config.samples;
  const std::size_t c_count = config.classes;
  const double anchor_gap = std::log(4.0);

  std::vector<float> values(n * t_count * c_count);
  SyntheticSet out;
  out.labels.kind = TensorKind::kClassifierSoftmax;
  out.labels.classes.resize(n);
  out.noise.resize(n);
  out.dominant.resize(n);

  std::vector<double> base(c_count);
  std::vector<double> logits(c_count);
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng = input_stream(config.seed, i);
    const std::size_t d = rng.below(c_count);
    const double u = rng.uniform();
    const double s = noise_level(config, u);
    for (std::size_t c = 0; c < c_count; ++c) {
      if (c != d) base[c] = 0.5 * rng.gaussian();
    }
    base[d] = logsumexp_except(base, d) + kBaseMargin;

    const double a = rng.uniform();
    const double b = rng.uniform();
    std::size_t label = d;
    if (u >= kHardNoiseLevel && a < config.mislabel_link) {
      label = (d + 1 + std::min(c_count - 2, static_cast<std::size_t>(
                                                 b * static_cast<double>(c_count - 1)))) %
              c_count;
    }
    out.labels.classes[i] = static_cast<std::int32_t>(label);
    out.noise[i] = s;
    out.dominant[i] = static_cast<std::int32_t>(d);

    for (std::size_t t = 0; t < t_count; ++t) {
      for (std::size_t c = 0; c < c_count; ++c) logits[c] = base[c] + s * rng.gaussian();
      if (t % 3 != 2) {
        logits[d] = std::max(logits[d], logsumexp_except(logits, d) + anchor_gap);
      }
      softmax_into(logits, values.data() + (i * t_count + t) * c_count);
    }
  }
  out.tensor = SampleTensor::classifier(n, t_count, c_count, std::move(values));
  return out;
}

SyntheticRegressionSet generate_regression(const GeneratorConfig& config) {
  check_config(config, false);
  const std::size_t n = config.inputs;
  const std::size_t t_count = config.samples;
  std::vector<float> means(n * t_count);
  std::vector<float> variances(n * t_count);
  SyntheticRegressionSet out;
  out.targets.kind = TensorKind::kRegression;
  out.targets.targets.resize(n);
  out.noise.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng = input_stream(config.seed, i);
    const double y = 10.0 * rng.gaussian();
    const double u = rng.uniform();
    const double s = noise_level(config, u);
    const double a = rng.uniform();
    const double b = rng.uniform();
    double target = y;
    if (u >= kHardNoiseLevel && a < config.mislabel_link) {
      target += (b < 0.5 ? -10.0 : 10.0) * config.noise_scale;
    }
    out.targets.targets[i] = target;
    out.noise[i] = s;
    for (std::size_t t = 0; t < t_count; ++t) {
      means[i * t_count + t] = static_cast<float>(y + s * rng.gaussian());
      variances[i * t_count + t] = static_cast<float>(s * s * (0.5 + rng.uniform()));
    }
  }
  out.means = SampleTensor::regression(n, t_count, std::move(means));
  out.variances = SampleTensor::regression(n, t_count, std::move(variances));
  return out;
}

}  // namespace uqsup
