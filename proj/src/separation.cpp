#include "rainsep/separation.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rainsep {

void SeparationConfig::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("separation.lambda must be positive");
  if (!(eta > 0.0)) throw std::invalid_argument("separation.eta must be positive");
  if (irls_iters < 1) throw std::invalid_argument("separation.irls_iters must be >= 1");
  if (!(epsilon_irls > 0.0)) throw std::invalid_argument("separation.epsilon_irls must be positive");
  if (!(solver_tol > 0.0)) throw std::invalid_argument("separation.solver_tol must be positive");
}

Index DerivativeKernel::row_begin() const {
  int lo = 0;
  for (const auto& [dr, dc] : offsets) lo = std::min(lo, dr);
  return -lo;
}

Index DerivativeKernel::row_end(Index rows) const {
  int hi = 0;
  for (const auto& [dr, dc] : offsets) hi = std::max(hi, dr);
  return rows - hi;
}

Index DerivativeKernel::col_begin() const {
  int lo = 0;
  for (const auto& [dr, dc] : offsets) lo = std::min(lo, dc);
  return -lo;
}

Index DerivativeKernel::col_end(Index cols) const {
  int hi = 0;
  for (const auto& [dr, dc] : offsets) hi = std::max(hi, dc);
  return cols - hi;
}

FilterBank build_filter_bank() {
  FilterBank bank;
  bank.kernels[0] = {{{0, 0}, {0, 1}}, {-1.0, 1.0}};                   // horizontal first
  bank.kernels[1] = {{{0, 0}, {1, 0}}, {-1.0, 1.0}};                   // vertical first
  bank.kernels[2] = {{{0, -1}, {0, 0}, {0, 1}}, {1.0, -2.0, 1.0}};     // horizontal second
  bank.kernels[3] = {{{-1, 0}, {0, 0}, {1, 0}}, {1.0, -2.0, 1.0}};     // vertical second
  return bank;
}

double kernel_response(const Plane& plane, const DerivativeKernel& kernel, Index anchor_row,
                       Index anchor_col) {
  double r = 0.0;
  for (size_t t = 0; t < kernel.offsets.size(); ++t)
    r += kernel.coeffs[t] * plane(anchor_row + kernel.offsets[t].first,
                                  anchor_col + kernel.offsets[t].second);
  return r;
}

SparseL1System assemble_system(const Plane& channel, const Mask& rain_mask,
                               const FilterBank& bank, const SeparationConfig& config) {
  config.validate();
  const Index rows = channel.rows(), cols = channel.cols();
  if (rows < 1 || cols < 1) throw std::invalid_argument("assemble_system: empty channel");
  if (rain_mask.rows() != rows || rain_mask.cols() != cols)
    throw std::invalid_argument("assemble_system: mask dimensions do not match channel");

  Index total_responses = 0;
  for (const auto& k : bank.kernels) {
    const Index nr = std::max<Index>(0, k.row_end(rows) - k.row_begin());
    const Index nc = std::max<Index>(0, k.col_end(cols) - k.col_begin());
    total_responses += nr * nc;
  }

  const Index n_pixels = rows * cols;
  const Index n_nonrain = n_pixels - Index((rain_mask == true).count());
  const bool anchor_all = n_nonrain == 0;
  const Index n_anchor = anchor_all ? n_pixels : n_nonrain;
  const Index n_rows = 3 * total_responses + n_anchor;

  SparseL1System system;
  system.b = Eigen::VectorXd::Zero(n_rows);
  system.unknown_rows = rows;
  system.unknown_cols = cols;
  system.anchored_all_pixels = anchor_all;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(size_t(3 * total_responses) * 3 + size_t(n_anchor));
  const auto pixel_index = [rows](Index i, Index j) { return i + j * rows; };

  // terms enumerated per kernel in raster order; three passes share the order:
  //   pass 0: |w . I_R|            weight 1, b = 0
  //   pass 1: |w . (I - I_R)|      weight 1, b = w . I
  //   pass 2: rain support         weight lambda, b = w . I
  //           non-rain support     weight lambda, b = 0
  Index row = 0;
  for (int pass = 0; pass < 3; ++pass) {
    for (const auto& kernel : bank.kernels) {
      for (Index i = kernel.row_begin(); i < kernel.row_end(rows); ++i) {
        for (Index j = kernel.col_begin(); j < kernel.col_end(cols); ++j) {
          double weight = 1.0;
          double target = 0.0;
          if (pass == 1) {
            target = kernel_response(channel, kernel, i, j);
          } else if (pass == 2) {
            weight = config.lambda;
            bool touches_rain = false;
            for (const auto& [dr, dc] : kernel.offsets)
              touches_rain = touches_rain || rain_mask(i + dr, j + dc);
            if (touches_rain) target = kernel_response(channel, kernel, i, j);
          }
          for (size_t t = 0; t < kernel.offsets.size(); ++t)
            triplets.emplace_back(row, pixel_index(i + kernel.offsets[t].first,
                                                   j + kernel.offsets[t].second),
                                  weight * kernel.coeffs[t]);
          system.b[row] = weight * target;
          ++row;
        }
      }
    }
  }

  // boundary condition: eta |I_R| on non-rain pixels (all pixels when the
  // mask covers the whole image, which keeps the system full rank)
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (anchor_all || !rain_mask(i, j))
        triplets.emplace_back(row++, pixel_index(i, j), config.eta);

  system.A.resize(n_rows, n_pixels);
  system.A.setFromTriplets(triplets.begin(), triplets.end());
  return system;
}

namespace {

Eigen::VectorXd solve_checked(Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& ldlt,
                              const Eigen::SparseMatrix<double>& normal,
                              const Eigen::VectorXd& rhs, double tol) {
  ldlt.factorize(normal);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("IRLS inner solve: factorization failed");
  Eigen::VectorXd v = ldlt.solve(rhs);
  const double scale = std::max(1.0, rhs.norm());
  Eigen::VectorXd residual = rhs - normal * v;
  if (residual.norm() > tol * scale) {
    v += ldlt.solve(residual);  // one refinement step
    residual = rhs - normal * v;
    if (residual.norm() > tol * scale)
      throw NumericalError("IRLS inner solve: residual above solver_tol");
  }
  return v;
}

}  // namespace

IrlsResult irls_solve(const SparseL1System& system, const SeparationConfig& config) {
  config.validate();
  const Eigen::SparseMatrix<double>& A = system.A;
  const Eigen::VectorXd& b = system.b;

  Eigen::SparseMatrix<double> normal = A.transpose() * A;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.analyzePattern(normal);

  IrlsResult result;
  result.v = solve_checked(ldlt, normal, A.transpose() * b, config.solver_tol);
  result.objective_initial = (A * result.v - b).lpNorm<1>();

  Eigen::SparseMatrix<double> scaled = A;
  for (int iter = 0; iter < config.irls_iters; ++iter) {
    const Eigen::VectorXd residual = (A * result.v - b).cwiseAbs();
    Eigen::VectorXd sqrt_w(residual.size());
    for (Index i = 0; i < residual.size(); ++i)
      sqrt_w[i] = std::pow(std::max(residual[i], config.epsilon_irls), -0.5);

    // scale rows of A and entries of b by sqrt(w); the normal equations then
    // realize A^T diag(w) A v = A^T diag(w) b
    scaled = A;
    for (Index col = 0; col < scaled.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(scaled, col); it; ++it)
        it.valueRef() *= sqrt_w[it.row()];
    const Eigen::VectorXd scaled_b = sqrt_w.cwiseProduct(b);

    normal = scaled.transpose() * scaled;
    result.v = solve_checked(ldlt, normal, scaled.transpose() * scaled_b, config.solver_tol);
    ++result.iterations;
  }
  result.objective_final = (A * result.v - b).lpNorm<1>();
  return result;
}

namespace {

// Makes rain + background reproduce the channel bitwise. For rain in
// [0, channel] one pass is exact (Sterbenz); the loop covers unclamped runs.
void split_exact(const Plane& channel, Plane& rain, Plane& background) {
  for (int pass = 0; pass < 4; ++pass) {
    background = channel - rain;
    rain = channel - background;
    if (((rain + background) == channel).all()) return;
  }
}

}  // namespace

LayerPair separate_layers(const Raster& image, const Mask& rain_mask,
                          const SeparationConfig& config, std::vector<ChannelSolveInfo>* info) {
  const Index rows = image.rows(), cols = image.cols();
  if (rain_mask.rows() != rows || rain_mask.cols() != cols)
    throw std::invalid_argument("separate_layers: mask dimensions do not match image");

  const FilterBank bank = build_filter_bank();
  LayerPair layers{Raster(rows, cols), Raster(rows, cols)};
  if (info) info->clear();

  for (int c = 0; c < 3; ++c) {
    const SparseL1System system = assemble_system(image.channel[c], rain_mask, bank, config);
    const IrlsResult solved = irls_solve(system, config);
    if (info)
      info->push_back({solved.objective_initial, solved.objective_final, solved.iterations,
                       system.anchored_all_pixels});

    Plane rain = Eigen::Map<const Plane>(solved.v.data(), rows, cols);
    if (config.clamp_rain) rain = rain.max(0.0).min(image.channel[c]);
    split_exact(image.channel[c], rain, layers.background.channel[c]);
    layers.rain.channel[c] = rain;
  }
  return layers;
}

}  // namespace rainsep
