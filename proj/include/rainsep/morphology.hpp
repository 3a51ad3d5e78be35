#pragma once

#include "rainsep/raster.hpp"

#include <utility>
#include <vector>

namespace rainsep {

enum class Connectivity { four, eight };

/// Offset set defining a dilation neighborhood; must contain the origin.
struct StructuringElement {
  std::vector<std::pair<int, int>> offsets;  // (dr, dc)

  bool contains_origin() const {
    for (const auto& [dr, dc] : offsets)
      if (dr == 0 && dc == 0) return true;
    return false;
  }

  /// Radius-1 diamond: center plus 4-neighbors (the 3x3 "disk").
  static StructuringElement disk1() {
    return {{{0, 0}, {-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
  }

  static StructuringElement square3() {
    StructuringElement e;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) e.offsets.emplace_back(dr, dc);
    return e;
  }
};

/// Labels 0 = background, 1..component_count assigned in raster-scan
/// discovery order. pixel_lists[p-1] holds the coordinates of component p.
struct ComponentLabeling {
  Eigen::ArrayXXi labels;
  int component_count = 0;
  std::vector<std::vector<PixelCoord>> pixel_lists;
};

ComponentLabeling label_components(const Mask& mask, Connectivity connectivity);

Mask dilate(const Mask& mask, const StructuringElement& element);

}  // namespace rainsep
