#pragma once

#include "rainsep/raster.hpp"

namespace rainsep {

struct QualityReport {
  double psnr_db = 0.0;  // +infinity when the images are identical
  double ssim = 0.0;
};

/// PSNR on the 8-bit scale over all pixels and channels; +infinity for MSE 0.
double psnr(const Raster& a, const Raster& b);

/// Mean SSIM of the BT.601 luminance over all valid 11x11 Gaussian windows
/// (sigma 1.5, K1 = 0.01, K2 = 0.03, L = 255). Requires min(H, W) >= 11.
double ssim(const Raster& a, const Raster& b);

QualityReport evaluate_quality(const Raster& reference, const Raster& test);

}  // namespace rainsep
