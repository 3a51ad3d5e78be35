// Procedural clean test scenes: smooth gradients, soft blobs, and a few
// colored patches give natural-image texture without binary fixtures.
#pragma once

#include "rainsep/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace rainsep::testing {

inline Raster make_scene(std::uint64_t seed, Index rows, Index cols) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto sample = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  Raster img(rows, cols);
  const double base = sample(0.25, 0.55);
  const double grad_r = sample(-0.2, 0.2), grad_c = sample(-0.2, 0.2);
  const std::array<double, 3> tint = {sample(-0.05, 0.05), sample(-0.05, 0.05),
                                      sample(-0.05, 0.05)};
  for (int c = 0; c < 3; ++c)
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j)
        img.channel[c](i, j) =
            base + tint[c] + grad_r * double(i) / double(rows) + grad_c * double(j) / double(cols);

  // soft blobs with mild per-channel variation
  const int n_blobs = 4 + int(sample(0.0, 3.0));
  for (int blob = 0; blob < n_blobs; ++blob) {
    const double cr = sample(0.0, double(rows)), cc = sample(0.0, double(cols));
    const double sigma = sample(double(std::min(rows, cols)) / 16.0,
                                double(std::min(rows, cols)) / 5.0);
    const double amp = sample(-0.22, 0.28);
    const std::array<double, 3> delta = {sample(-0.04, 0.04), sample(-0.04, 0.04),
                                         sample(-0.04, 0.04)};
    for (int c = 0; c < 3; ++c)
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
          const double d2 = (double(i) - cr) * (double(i) - cr) +
                            (double(j) - cc) * (double(j) - cc);
          img.channel[c](i, j) += (amp + delta[c]) * std::exp(-0.5 * d2 / (sigma * sigma));
        }
  }

  // colored rectangular patches with hard edges
  const int n_rects = 2 + int(sample(0.0, 2.0));
  for (int rect = 0; rect < n_rects; ++rect) {
    const Index r0 = Index(sample(0.0, double(rows) * 0.8));
    const Index c0 = Index(sample(0.0, double(cols) * 0.8));
    const Index r1 = std::min<Index>(rows - 1, r0 + Index(sample(8.0, double(rows) / 3.0)));
    const Index c1 = std::min<Index>(cols - 1, c0 + Index(sample(8.0, double(cols) / 3.0)));
    std::array<double, 3> amp = {sample(-0.2, 0.25), sample(-0.2, 0.25), sample(-0.2, 0.25)};
    // keep the patch visibly colored so it never mimics neutral rain
    if (std::abs(amp[0] - amp[1]) < 0.1) amp[0] += amp[0] >= amp[1] ? 0.1 : -0.1;
    for (int c = 0; c < 3; ++c)
      for (Index i = r0; i <= r1; ++i)
        for (Index j = c0; j <= c1; ++j) img.channel[c](i, j) += amp[c];
  }

  for (auto& channel : img.channel) channel = channel.max(0.03).min(0.9);

  // snap to the 8-bit grid, matching what a PNG-backed pipeline sees
  for (auto& channel : img.channel)
    channel = (channel * 255.0).round() / 255.0;
  return img;
}

}  // namespace rainsep::testing
