#pragma once

#include "rainsep/raster.hpp"

#include <Eigen/Sparse>

#include <array>
#include <utility>
#include <vector>

namespace rainsep {

struct SeparationConfig {
  double lambda = 0.25;       // gradient-agreement weight
  double eta = 0.1;           // boundary-condition weight
  int irls_iters = 3;
  double epsilon_irls = 1e-6;  // residual floor for reweighting
  double solver_tol = 1e-8;    // relative residual of the inner solve
  bool clamp_rain = true;

  void validate() const;
};

/// Derivative kernel with a declared anchor: offsets are relative to the
/// anchor pixel and the coefficients sum to zero.
struct DerivativeKernel {
  std::vector<std::pair<int, int>> offsets;  // (dr, dc)
  std::vector<double> coeffs;

  // valid anchor rectangle for an image of the given size
  Index row_begin() const;
  Index row_end(Index rows) const;  // one past the last valid anchor row
  Index col_begin() const;
  Index col_end(Index cols) const;
};

/// Horizontal/vertical first differences (-1, +1) anchored at the left/top
/// support pixel, and second differences (+1, -2, +1) anchored at the center.
struct FilterBank {
  std::array<DerivativeKernel, 4> kernels;
};

FilterBank build_filter_bank();

double kernel_response(const Plane& plane, const DerivativeKernel& kernel, Index anchor_row,
                       Index anchor_col);

/// Vectorized L1 problem min ||A v - b||_1 over the rain layer of one
/// channel. Regularization weights are folded into A and b at assembly.
struct SparseL1System {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  Index unknown_rows = 0;  // channel height, for reshaping v
  Index unknown_cols = 0;
  bool anchored_all_pixels = false;  // fallback taken because S_NR was empty
};

SparseL1System assemble_system(const Plane& channel, const Mask& rain_mask,
                               const FilterBank& bank, const SeparationConfig& config);

struct IrlsResult {
  Eigen::VectorXd v;
  double objective_initial = 0.0;  // L1 objective at the least-squares start
  double objective_final = 0.0;
  int iterations = 0;
};

/// Iteratively reweighted least squares on min ||A v - b||_1: starts from the
/// normal-equations solution, then reweights rows by |residual|^(-1/2).
IrlsResult irls_solve(const SparseL1System& system, const SeparationConfig& config);

/// Rain / background decomposition with rain + background == input exactly.
struct LayerPair {
  Raster rain;
  Raster background;
};

struct ChannelSolveInfo {
  double objective_initial = 0.0;
  double objective_final = 0.0;
  int iterations = 0;
  bool anchored_all_pixels = false;
};

LayerPair separate_layers(const Raster& image, const Mask& rain_mask,
                          const SeparationConfig& config,
                          std::vector<ChannelSolveInfo>* info = nullptr);

}  // namespace rainsep
