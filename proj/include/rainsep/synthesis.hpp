#pragma once

#include "rainsep/raster.hpp"

#include <cstdint>

namespace rainsep {

/// Streak parameters for the synthetic rain renderer. Angles are degrees
/// from vertical, matching the detection convention (0 = falling straight
/// down). All draws are controlled by the seed.
struct RainSynthConfig {
  std::uint64_t seed = 0;
  int streak_count = 60;
  double angle_mean_degrees = 0.0;
  double angle_jitter_degrees = 4.0;
  double length_min = 15.0;
  double length_max = 40.0;
  double thickness_min = 1.0;
  double thickness_max = 2.0;
  double intensity_min = 0.15;
  double intensity_max = 0.45;
  double blur_sigma = 0.5;

  void validate() const;
};

struct SynthResult {
  Raster rainy;
  Mask truth;  // streak field > 0.02
};

/// Renders anti-aliased streaks into an additive field, blurs it, and
/// composites rainy = min(clean + field, 1) equally on all channels.
SynthResult synth_rain(const Raster& clean, const RainSynthConfig& config);

}  // namespace rainsep
