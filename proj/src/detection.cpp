#include "rainsep/detection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rainsep {

void DetectionConfig::validate() const {
  if (window_side < 3 || window_side % 2 == 0)
    throw std::invalid_argument("detection.window_side must be odd and >= 3");
  if (kmeans_iters < 1) throw std::invalid_argument("detection.kmeans_iters must be >= 1");
  if (!(t1_degrees > 0.0 && t1_degrees <= 90.0))
    throw std::invalid_argument("detection.T1 must be in (0, 90]");
  if (!(t2_chroma > 0.0)) throw std::invalid_argument("detection.T2 must be positive");
  if (!(mu_aspect >= 1.0)) throw std::invalid_argument("detection.mu must be >= 1");
  if (!(c_scale > 0.0)) throw std::invalid_argument("detection.c must be positive");
  if (element.offsets.empty() || !element.contains_origin())
    throw std::invalid_argument("detection.element must be nonempty and contain the origin");
}

Mask detect_initial(const Raster& image, const DetectionConfig& config) {
  config.validate();
  const Index rows = image.rows(), cols = image.cols();
  if (rows < 1 || cols < 1) throw std::invalid_argument("detect_initial: empty image");

  const int h = config.window_side - 1;
  const int half = h / 2;
  // Window extents relative to the pixel: center, then the four placements
  // with the pixel at the top-left, top-right, bottom-left, bottom-right.
  const std::array<std::array<int, 4>, 5> spans = {{{-half, half, -half, half},
                                                    {0, h, 0, h},
                                                    {0, h, -h, 0},
                                                    {-h, 0, 0, h},
                                                    {-h, 0, -h, 0}}};

  // Working in 8-bit units makes the comparison exact integer arithmetic for
  // PNG-backed data, so uniform regions can never tie their way into the mask.
  std::array<Plane, 3> scaled;
  for (int c = 0; c < 3; ++c) scaled[c] = image.channel[c] * 255.0;

  Mask out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      bool rain = true;
      for (const auto& span : spans) {
        const Index r0 = std::max<Index>(0, i + span[0]);
        const Index r1 = std::min<Index>(rows - 1, i + span[1]);
        const Index c0 = std::max<Index>(0, j + span[2]);
        const Index c1 = std::min<Index>(cols - 1, j + span[3]);
        for (int c = 0; c < 3 && rain; ++c) {
          const double center = scaled[c](i, j);
          // I > mean over w  <=>  sum over w of (I - I(m,n)) > 0
          double excess = 0.0;
          for (Index m = r0; m <= r1; ++m)
            for (Index n = c0; n <= c1; ++n) excess += center - scaled[c](m, n);
          if (!(excess > 0.0)) rain = false;
        }
        if (!rain) break;
      }
      out(i, j) = rain;
    }
  }
  return out;
}

double direction_degrees(const Eigen::Vector2d& e1) {
  double row = e1[0], col = e1[1];
  if (row == 0.0 && col == 0.0) return 0.0;
  if (row < 0.0 || (row == 0.0 && col < 0.0)) {
    row = -row;
    col = -col;
  }
  if (row == 0.0) return 90.0;
  return std::atan2(col, row) * 180.0 / std::numbers::pi;
}

ComponentStats component_stats(const std::vector<PixelCoord>& pixels, double c_scale) {
  if (pixels.empty()) throw std::invalid_argument("component_stats: empty pixel list");
  ComponentStats s;
  const double n = static_cast<double>(pixels.size());

  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pixels) mean += Eigen::Vector2d(double(p.row), double(p.col));
  mean /= n;
  s.mean = mean;

  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pixels) {
    const Eigen::Vector2d d = Eigen::Vector2d(double(p.row), double(p.col)) - mean;
    cov += d * d.transpose();
  }
  cov /= n;
  s.covariance = cov;

  if (pixels.size() == 1) {
    s.lambda1 = s.lambda2 = 0.0;
    s.e1 = Eigen::Vector2d(1.0, 0.0);
    s.e2 = Eigen::Vector2d(0.0, 1.0);
    s.direction_degrees = 0.0;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    s.lambda2 = std::max(0.0, eig.eigenvalues()(0));
    s.lambda1 = std::max(0.0, eig.eigenvalues()(1));
    s.e1 = eig.eigenvectors().col(1);
    s.e2 = eig.eigenvectors().col(0);
    // canonical sign: first nonzero coordinate nonnegative
    for (auto* v : {&s.e1, &s.e2})
      if ((*v)[0] < 0.0 || ((*v)[0] == 0.0 && (*v)[1] < 0.0)) *v = -*v;
    s.direction_degrees = direction_degrees(s.e1);
  }
  s.length = c_scale * s.lambda1;
  s.width = c_scale * s.lambda2;
  return s;
}

KMeans1D kmeans_1d(const std::vector<double>& values, int k, int iters) {
  if (values.empty()) throw std::invalid_argument("kmeans_1d: empty input");
  if (k != 1 && k != 2) throw std::invalid_argument("kmeans_1d: k must be 1 or 2");
  if (iters < 1) throw std::invalid_argument("kmeans_1d: iters must be >= 1");

  KMeans1D result;
  result.assignment.assign(values.size(), 0);

  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double mn = *mn_it, mx = *mx_it;

  if (k == 1) {
    double sum = 0.0;
    for (double v : values) sum += v;
    result.centroids = {sum / double(values.size())};
    return result;
  }

  if (mn == mx) {
    result.centroids = {mn, mn};
    result.degenerate = true;
    return result;
  }

  double c0 = mn, c1 = mx;
  for (int it = 0; it < iters; ++it) {
    bool changed = false;
    double sum0 = 0.0, sum1 = 0.0;
    int n0 = 0, n1 = 0;
    for (size_t i = 0; i < values.size(); ++i) {
      const double d0 = std::abs(values[i] - c0);
      const double d1 = std::abs(values[i] - c1);
      const int a = d0 <= d1 ? 0 : 1;  // tie -> lower centroid
      if (a != result.assignment[i]) changed = true;
      result.assignment[i] = a;
      if (a == 0) {
        sum0 += values[i];
        ++n0;
      } else {
        sum1 += values[i];
        ++n1;
      }
    }
    if (n0 > 0) c0 = sum0 / n0;
    if (n1 > 0) c1 = sum1 / n1;
    if (!changed && it > 0) break;
  }
  result.centroids = {c0, c1};
  return result;
}

UvColor uv_transform(const Eigen::Vector3d& mean_rgb) {
  UvColor uv;
  const double phi = mean_rgb.sum() / 3.0;
  if (!(phi > 0.0)) {
    uv.neutral_defined = false;
    uv.magnitude = std::numeric_limits<double>::infinity();
    return uv;
  }
  const double g = mean_rgb[1], b = mean_rgb[2];
  uv.u = (2.0 * phi - g - b) / phi;
  uv.v = std::max((phi - g) / phi, (phi - b) / phi);
  uv.magnitude = std::hypot(uv.u, uv.v);
  return uv;
}

std::vector<int> filter_by_width(const std::vector<ComponentStats>& stats,
                                 const std::vector<int>& candidates,
                                 const DetectionConfig& config) {
  if (candidates.size() < 2) return candidates;
  std::vector<double> widths;
  widths.reserve(candidates.size());
  for (int id : candidates) widths.push_back(stats[id].width);

  const KMeans1D km = kmeans_1d(widths, 2, config.kmeans_iters);
  if (km.degenerate) return candidates;

  const int wide_cluster = km.centroids[1] > km.centroids[0] ? 1 : 0;
  std::vector<int> kept;
  for (size_t i = 0; i < candidates.size(); ++i)
    if (km.assignment[i] != wide_cluster) kept.push_back(candidates[i]);
  return kept;
}

std::vector<int> filter_by_direction(const std::vector<ComponentStats>& stats,
                                     const std::vector<int>& candidates, double t1_degrees) {
  std::vector<int> kept;
  for (int id : candidates)
    if (std::abs(stats[id].direction_degrees) < t1_degrees) kept.push_back(id);
  return kept;
}

std::vector<int> filter_by_color(const Raster& image, const ComponentLabeling& labeling,
                                 const std::vector<int>& candidates, double t2_chroma) {
  std::vector<int> kept;
  for (int id : candidates) {
    const auto& pixels = labeling.pixel_lists[id];
    Eigen::Vector3d mean_rgb = Eigen::Vector3d::Zero();
    for (const auto& p : pixels)
      for (int c = 0; c < 3; ++c) mean_rgb[c] += image.channel[c](p.row, p.col);
    mean_rgb /= double(pixels.size());
    const UvColor uv = uv_transform(mean_rgb);
    if (uv.neutral_defined && uv.magnitude <= t2_chroma) kept.push_back(id);
  }
  return kept;
}

std::vector<int> filter_by_aspect(const std::vector<ComponentStats>& stats,
                                  const std::vector<int>& candidates, double mu_aspect) {
  constexpr double kAspectFloor = 1e-9;  // keeps lambda2 = 0 lines, drops single pixels
  std::vector<int> kept;
  for (int id : candidates) {
    const double ratio = stats[id].lambda1 / std::max(stats[id].lambda2, kAspectFloor);
    if (ratio >= mu_aspect) kept.push_back(id);
  }
  return kept;
}

DetectionTrace detect_rain_traced(const Raster& image, const DetectionConfig& config) {
  DetectionTrace trace;
  trace.initial = detect_initial(image, config);
  trace.labeling = label_components(trace.initial, Connectivity::eight);

  trace.stats.reserve(trace.labeling.pixel_lists.size());
  for (const auto& pixels : trace.labeling.pixel_lists)
    trace.stats.push_back(component_stats(pixels, config.c_scale));

  std::vector<int> ids(trace.stats.size());
  for (size_t i = 0; i < ids.size(); ++i) ids[i] = int(i);

  trace.after_width = filter_by_width(trace.stats, ids, config);
  trace.after_direction = filter_by_direction(trace.stats, trace.after_width, config.t1_degrees);
  trace.after_color =
      filter_by_color(image, trace.labeling, trace.after_direction, config.t2_chroma);
  trace.after_aspect = filter_by_aspect(trace.stats, trace.after_color, config.mu_aspect);

  trace.refined = Mask::Constant(image.rows(), image.cols(), false);
  for (int id : trace.after_aspect)
    for (const auto& p : trace.labeling.pixel_lists[id]) trace.refined(p.row, p.col) = true;

  trace.final_mask = dilate(trace.refined, config.element);
  return trace;
}

Mask detect_rain(const Raster& image, const DetectionConfig& config) {
  return detect_rain_traced(image, config).final_mask;
}

}  // namespace rainsep
