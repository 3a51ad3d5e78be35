#include "rainsep/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace rainsep {

void RainSynthConfig::validate() const {
  if (streak_count < 0) throw std::invalid_argument("synth.streak_count must be >= 0");
  if (!(angle_jitter_degrees >= 0.0))
    throw std::invalid_argument("synth.angle_jitter must be >= 0");
  if (!(length_min >= 0.0 && length_max >= length_min))
    throw std::invalid_argument("synth.length range must be nonempty and nonnegative");
  if (!(thickness_min >= 0.0 && thickness_max >= thickness_min))
    throw std::invalid_argument("synth.thickness range must be nonempty and nonnegative");
  if (!(intensity_min >= 0.0 && intensity_max >= intensity_min && intensity_max <= 1.0))
    throw std::invalid_argument("synth.intensity range must be within [0, 1]");
  if (!(blur_sigma >= 0.0)) throw std::invalid_argument("synth.blur_sigma must be >= 0");
}

namespace {

// Values below one 8-bit quantization step are dropped after blurring so
// every visible residue stays within one pixel of the truth mask.
constexpr double kFieldFloor = 0.004;
constexpr double kTruthThreshold = 0.02;

double segment_distance(double pr, double pc, double ar, double ac, double br, double bc) {
  const double dr = br - ar, dc = bc - ac;
  const double len2 = dr * dr + dc * dc;
  double t = len2 > 0.0 ? ((pr - ar) * dr + (pc - ac) * dc) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double qr = ar + t * dr, qc = ac + t * dc;
  return std::hypot(pr - qr, pc - qc);
}

Plane gaussian_blur(const Plane& field, double sigma) {
  if (sigma <= 0.0) return field;
  const int radius = std::max(1, int(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    kernel[t + radius] = std::exp(-0.5 * (t * t) / (sigma * sigma));
    total += kernel[t + radius];
  }
  for (double& w : kernel) w /= total;

  const Index rows = field.rows(), cols = field.cols();
  Plane tmp = Plane::Zero(rows, cols), out = Plane::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t) {
        const Index n = j + t;
        if (n >= 0 && n < cols) acc += kernel[t + radius] * field(i, n);
      }
      tmp(i, j) = acc;
    }
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t) {
        const Index m = i + t;
        if (m >= 0 && m < rows) acc += kernel[t + radius] * tmp(m, j);
      }
      out(i, j) = acc;
    }
  return out;
}

}  // namespace

SynthResult synth_rain(const Raster& clean, const RainSynthConfig& config) {
  config.validate();
  const Index rows = clean.rows(), cols = clean.cols();
  if (rows < 1 || cols < 1) throw std::invalid_argument("synth_rain: empty image");

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto sample = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  Plane field = Plane::Zero(rows, cols);
  for (int s = 0; s < config.streak_count; ++s) {
    const double center_row = sample(0.0, double(rows));
    const double center_col = sample(0.0, double(cols));
    const double angle = config.angle_mean_degrees +
                         sample(-config.angle_jitter_degrees, config.angle_jitter_degrees);
    const double length = sample(config.length_min, config.length_max);
    const double thickness = sample(config.thickness_min, config.thickness_max);
    const double intensity = sample(config.intensity_min, config.intensity_max);

    const double rad = angle * std::numbers::pi / 180.0;
    const double dir_r = std::cos(rad), dir_c = std::sin(rad);
    const double ar = center_row - 0.5 * length * dir_r;
    const double ac = center_col - 0.5 * length * dir_c;
    const double br = center_row + 0.5 * length * dir_r;
    const double bc = center_col + 0.5 * length * dir_c;

    const double reach = 0.5 * thickness + 1.0;
    const Index r0 = std::max<Index>(0, Index(std::floor(std::min(ar, br) - reach)));
    const Index r1 = std::min<Index>(rows - 1, Index(std::ceil(std::max(ar, br) + reach)));
    const Index c0 = std::max<Index>(0, Index(std::floor(std::min(ac, bc) - reach)));
    const Index c1 = std::min<Index>(cols - 1, Index(std::ceil(std::max(ac, bc) + reach)));

    for (Index i = r0; i <= r1; ++i)
      for (Index j = c0; j <= c1; ++j) {
        const double d = segment_distance(double(i), double(j), ar, ac, br, bc);
        const double coverage = std::clamp(0.5 * thickness + 0.5 - d, 0.0, 1.0);
        if (coverage > 0.0) field(i, j) += intensity * coverage;
      }
  }

  field = gaussian_blur(field, config.blur_sigma);
  field = (field > kFieldFloor).select(field, 0.0);

  SynthResult result;
  result.truth = field > kTruthThreshold;
  result.rainy = clean;
  for (auto& channel : result.rainy.channel) channel = (channel + field).min(1.0);
  return result;
}

}  // namespace rainsep
