#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>

namespace rainsep {

using Index = Eigen::Index;

/// Single image plane, row-indexed first: plane(i, j) is row i, column j.
template <typename Scalar>
using PlaneT = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Plane = PlaneT<double>;

/// Per-pixel boolean map (rain / non-rain locations).
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct PixelCoord {
  Index row = 0;
  Index col = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// RGB image with intensities in [0,1]. 8-bit files are divided by 255 on
/// load and rounded half-up on save.
template <typename Scalar>
struct RasterT {
  std::array<PlaneT<Scalar>, 3> channel;

  RasterT() = default;
  RasterT(Index rows, Index cols) {
    for (auto& c : channel) c = PlaneT<Scalar>::Zero(rows, cols);
  }

  Index rows() const { return channel[0].rows(); }
  Index cols() const { return channel[0].cols(); }

  static RasterT constant(Index rows, Index cols, Scalar value) {
    RasterT img(rows, cols);
    for (auto& c : img.channel) c.setConstant(value);
    return img;
  }

  bool same_shape(const RasterT& other) const {
    return rows() == other.rows() && cols() == other.cols();
  }

  /// True when every stored intensity is finite and within [0,1].
  bool unit_range() const {
    for (const auto& c : channel)
      if (!(c.isFinite().all() && (c >= Scalar(0)).all() && (c <= Scalar(1)).all()))
        return false;
    return true;
  }
};

using Raster = RasterT<double>;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Raster load_png(const std::string& path);
void save_png(const std::string& path, const Raster& image);

/// Masks are 8-bit grayscale PNGs: 0 = clear, 255 = set (> 127 reads as set).
Mask load_mask_png(const std::string& path);
void save_mask_png(const std::string& path, const Mask& mask);

}  // namespace rainsep
