#include "rainsep/morphology.hpp"

#include <stdexcept>

namespace rainsep {

ComponentLabeling label_components(const Mask& mask, Connectivity connectivity) {
  const Index rows = mask.rows(), cols = mask.cols();
  if (rows < 1 || cols < 1) throw std::invalid_argument("label_components: empty mask");

  static constexpr int kOffsets8[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                          {0, 1},   {1, -1}, {1, 0},  {1, 1}};
  static constexpr int kOffsets4[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};
  const auto* offsets = connectivity == Connectivity::eight ? &kOffsets8[0] : &kOffsets4[0];
  const int n_offsets = connectivity == Connectivity::eight ? 8 : 4;

  ComponentLabeling result;
  result.labels = Eigen::ArrayXXi::Zero(rows, cols);

  std::vector<PixelCoord> stack;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (!mask(i, j) || result.labels(i, j) != 0) continue;
      const int label = ++result.component_count;
      result.pixel_lists.emplace_back();
      auto& pixels = result.pixel_lists.back();
      stack.push_back({i, j});
      result.labels(i, j) = label;
      while (!stack.empty()) {
        const PixelCoord p = stack.back();
        stack.pop_back();
        pixels.push_back(p);
        for (int k = 0; k < n_offsets; ++k) {
          const Index r = p.row + offsets[k][0];
          const Index c = p.col + offsets[k][1];
          if (r < 0 || r >= rows || c < 0 || c >= cols) continue;
          if (mask(r, c) && result.labels(r, c) == 0) {
            result.labels(r, c) = label;
            stack.push_back({r, c});
          }
        }
      }
    }
  }
  return result;
}

Mask dilate(const Mask& mask, const StructuringElement& element) {
  if (element.offsets.empty() || !element.contains_origin())
    throw std::invalid_argument("dilate: element must be nonempty and contain the origin");
  const Index rows = mask.rows(), cols = mask.cols();
  Mask out = Mask::Constant(rows, cols, false);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (!mask(i, j)) continue;
      for (const auto& [dr, dc] : element.offsets) {
        const Index r = i + dr, c = j + dc;
        if (r >= 0 && r < rows && c >= 0 && c < cols) out(r, c) = true;
      }
    }
  }
  return out;
}

}  // namespace rainsep
