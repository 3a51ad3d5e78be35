#pragma once

#include "rainsep/morphology.hpp"
#include "rainsep/raster.hpp"

#include <vector>

namespace rainsep {

struct DetectionConfig {
  int window_side = 7;        // odd, >= 3
  int kmeans_iters = 100;
  double t1_degrees = 10.0;   // direction threshold, (0, 90]
  double t2_chroma = 0.08;    // u-v magnitude threshold
  double mu_aspect = 2.0;     // minimum length/width eigenvalue ratio
  double c_scale = 1.0;       // proportional length/width parameter
  StructuringElement element = StructuringElement::disk1();

  void validate() const;
};

/// PCA summary of one connected component's pixel coordinates.
/// Coordinates are (row, col); a vertically falling streak has direction 0.
struct ComponentStats {
  Eigen::Vector2d mean;        // m_z
  Eigen::Matrix2d covariance;  // C_z, population form (divisor N)
  double lambda1 = 0.0;        // larger eigenvalue
  double lambda2 = 0.0;
  Eigen::Vector2d e1;          // unit eigenvector of lambda1
  Eigen::Vector2d e2;
  double length = 0.0;             // c * lambda1
  double width = 0.0;              // c * lambda2
  double direction_degrees = 0.0;  // in (-90, 90]
};

struct UvColor {
  double u = 0.0;
  double v = 0.0;
  double magnitude = 0.0;
  bool neutral_defined = true;  // false when the mean intensity is zero
};

struct KMeans1D {
  std::vector<int> assignment;    // cluster index per input value
  std::vector<double> centroids;  // ascending for k = 2
  bool degenerate = false;        // k exceeded the number of distinct values
};

/// Windowed intensity test: a pixel is flagged when, in every color channel,
/// it strictly exceeds the mean of each of the five windows that place it at
/// the center and four corners. Windows are clipped at image borders.
Mask detect_initial(const Raster& image, const DetectionConfig& config);

ComponentStats component_stats(const std::vector<PixelCoord>& pixels, double c_scale);

/// Angle in degrees between the row axis and the given vector, in (-90, 90].
double direction_degrees(const Eigen::Vector2d& e1);

/// Deterministic 1-D Lloyd iterations: centroids start at min/max, ties go
/// to the lower centroid. k must be 1 or 2.
KMeans1D kmeans_1d(const std::vector<double>& values, int k, int iters);

UvColor uv_transform(const Eigen::Vector3d& mean_rgb);

// Cascade filters: each takes candidate component ids (indices into stats)
// and returns the surviving subset in order.
std::vector<int> filter_by_width(const std::vector<ComponentStats>& stats,
                                 const std::vector<int>& candidates,
                                 const DetectionConfig& config);
std::vector<int> filter_by_direction(const std::vector<ComponentStats>& stats,
                                     const std::vector<int>& candidates, double t1_degrees);
std::vector<int> filter_by_color(const Raster& image, const ComponentLabeling& labeling,
                                 const std::vector<int>& candidates, double t2_chroma);
std::vector<int> filter_by_aspect(const std::vector<ComponentStats>& stats,
                                  const std::vector<int>& candidates, double mu_aspect);

/// Stage-by-stage record of one detection run.
struct DetectionTrace {
  Mask initial;
  ComponentLabeling labeling;
  std::vector<ComponentStats> stats;
  std::vector<int> after_width;
  std::vector<int> after_direction;
  std::vector<int> after_color;
  std::vector<int> after_aspect;
  Mask refined;     // survivors before dilation
  Mask final_mask;  // S_R
};

DetectionTrace detect_rain_traced(const Raster& image, const DetectionConfig& config);
Mask detect_rain(const Raster& image, const DetectionConfig& config);

}  // namespace rainsep
