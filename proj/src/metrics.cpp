#include "rainsep/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rainsep {

double psnr(const Raster& a, const Raster& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("psnr: image dimensions differ");
  double sq = 0.0;
  for (int c = 0; c < 3; ++c) sq += ((a.channel[c] - b.channel[c]) * 255.0).square().sum();
  const double mse = sq / double(3 * a.rows() * a.cols());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

Plane luminance255(const Raster& img) {
  return (0.299 * img.channel[0] + 0.587 * img.channel[1] + 0.114 * img.channel[2]) * 255.0;
}

// valid-mode separable convolution with a symmetric 1-D window
Plane valid_filter(const Plane& in, const std::vector<double>& w) {
  const int radius = int(w.size() / 2);
  const Index rows = in.rows(), cols = in.cols();
  Plane tmp(rows, cols - 2 * radius);
  for (Index i = 0; i < rows; ++i)
    for (Index j = radius; j < cols - radius; ++j) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t) acc += w[t + radius] * in(i, j + t);
      tmp(i, j - radius) = acc;
    }
  Plane out(rows - 2 * radius, tmp.cols());
  for (Index i = radius; i < rows - radius; ++i)
    for (Index j = 0; j < tmp.cols(); ++j) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t) acc += w[t + radius] * tmp(i + t, j);
      out(i - radius, j) = acc;
    }
  return out;
}

}  // namespace

double ssim(const Raster& a, const Raster& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("ssim: image dimensions differ");
  constexpr int kWindow = 11;
  if (a.rows() < kWindow || a.cols() < kWindow)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");

  constexpr double kSigma = 1.5;
  std::vector<double> w(kWindow);
  double total = 0.0;
  for (int t = 0; t < kWindow; ++t) {
    const double d = t - (kWindow - 1) / 2;
    w[t] = std::exp(-0.5 * d * d / (kSigma * kSigma));
    total += w[t];
  }
  for (double& x : w) x /= total;

  const Plane ya = luminance255(a);
  const Plane yb = luminance255(b);
  const Plane mu_a = valid_filter(ya, w);
  const Plane mu_b = valid_filter(yb, w);
  const Plane raw_aa = valid_filter(ya.square(), w);
  const Plane raw_bb = valid_filter(yb.square(), w);
  const Plane raw_ab = valid_filter(ya * yb, w);

  constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
  const Plane var_a = raw_aa - mu_a.square();
  const Plane var_b = raw_bb - mu_b.square();
  const Plane cov = raw_ab - mu_a * mu_b;

  const Plane ssim_map = ((2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2)) /
                         ((mu_a.square() + mu_b.square() + kC1) * (var_a + var_b + kC2));
  return ssim_map.mean();
}

QualityReport evaluate_quality(const Raster& reference, const Raster& test) {
  return {psnr(reference, test), ssim(reference, test)};
}

}  // namespace rainsep
