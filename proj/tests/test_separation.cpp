#include "rainsep/separation.hpp"

#include "corpus.hpp"
#include "oracles.hpp"
#include "rainsep/detection.hpp"
#include "rainsep/synthesis.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rainsep;

namespace {

SparseL1System dense_system(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  SparseL1System system;
  system.A = A.sparseView();
  system.A.makeCompressed();
  system.b = b;
  system.unknown_rows = A.cols();
  system.unknown_cols = 1;
  return system;
}

Plane ramp_plane(Index rows, Index cols, double delta) {
  Plane p(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) p(i, j) = delta * double(j);
  return p;
}

}  // namespace

TEST_CASE("filter bank kernels are zero-sum derivatives") {
  const FilterBank bank = build_filter_bank();
  for (const auto& kernel : bank.kernels) {
    double sum = 0.0;
    for (double c : kernel.coeffs) sum += c;
    CHECK(sum == 0.0);
    CHECK(kernel.offsets.size() <= 3);
  }

  SUBCASE("constant plane: every response vanishes") {
    const Plane flat = Plane::Constant(6, 7, 0.4);
    for (const auto& kernel : bank.kernels)
      for (Index i = kernel.row_begin(); i < kernel.row_end(6); ++i)
        for (Index j = kernel.col_begin(); j < kernel.col_end(7); ++j)
          CHECK(kernel_response(flat, kernel, i, j) == 0.0);
  }

  SUBCASE("linear ramp: second differences vanish") {
    const Plane ramp = ramp_plane(5, 9, 0.01);
    const auto& h2 = bank.kernels[2];
    for (Index i = h2.row_begin(); i < h2.row_end(5); ++i)
      for (Index j = h2.col_begin(); j < h2.col_end(9); ++j)
        CHECK(kernel_response(ramp, h2, i, j) == doctest::Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("quadratic column profile: first difference is 2j+1") {
    Plane quad(4, 8);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 8; ++j) quad(i, j) = double(j) * double(j);
    const auto& h1 = bank.kernels[0];
    for (Index i = h1.row_begin(); i < h1.row_end(4); ++i)
      for (Index j = h1.col_begin(); j < h1.col_end(8); ++j)
        CHECK(kernel_response(quad, h1, i, j) == doctest::Approx(2.0 * double(j) + 1.0));
  }
}

TEST_CASE("assemble_system row counts follow 3F + |S_NR|") {
  const FilterBank bank = build_filter_bank();
  const SeparationConfig config;

  SUBCASE("3x3 channel, empty mask") {
    const Plane channel = Plane::Constant(3, 3, 0.5);
    const Mask none = Mask::Constant(3, 3, false);
    const auto system = assemble_system(channel, none, bank, config);
    CHECK(system.A.rows() == 63);  // F = 18 responses
    CHECK(system.A.cols() == 9);
  }

  SUBCASE("1x2 channel: only the horizontal first difference fits") {
    const Plane channel = Plane::Constant(1, 2, 0.5);
    const Mask none = Mask::Constant(1, 2, false);
    const auto system = assemble_system(channel, none, bank, config);
    CHECK(system.A.rows() == 5);
    CHECK(system.A.cols() == 2);
  }

  SUBCASE("random shapes and masks") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
      const Index rows = 2 + Index(rng() % 9), cols = 2 + Index(rng() % 9);
      Plane channel = Plane::Constant(rows, cols, 0.5);
      Mask mask(rows, cols);
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) mask(i, j) = (rng() & 3) == 0;
      Index responses = rows * (cols - 1) + (rows - 1) * cols;
      if (cols >= 3) responses += rows * (cols - 2);
      if (rows >= 3) responses += (rows - 2) * cols;
      const auto system = assemble_system(channel, mask, bank, config);
      const Index anchors = mask.count() == rows * cols ? rows * cols
                                                        : rows * cols - mask.count();
      CHECK(system.A.rows() == 3 * responses + anchors);

      // kernel support bounds every row at three nonzeros
      Eigen::VectorXd row_nnz = Eigen::VectorXd::Zero(system.A.rows());
      for (Index k = 0; k < system.A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(system.A, k); it; ++it)
          row_nnz[it.row()] += 1.0;
      CHECK(row_nnz.maxCoeff() <= 3.0);
    }
  }
}

TEST_CASE("assemble_system: constant channel with empty mask targets zero") {
  const FilterBank bank = build_filter_bank();
  const auto system = assemble_system(Plane::Constant(5, 4, 0.37),
                                      Mask::Constant(5, 4, false), bank, SeparationConfig{});
  CHECK(system.b.isZero(0.0));  // v = 0 satisfies every row exactly
}

TEST_CASE("assemble_system rejects mismatched mask dimensions") {
  const FilterBank bank = build_filter_bank();
  CHECK_THROWS_AS(assemble_system(Plane::Constant(4, 4, 0.1), Mask::Constant(3, 4, false),
                                  bank, SeparationConfig{}),
                  std::invalid_argument);
}

TEST_CASE("irls_solve: consistent square system is exact at every iteration") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd b(2);
  b << 3.0, -1.0;
  SeparationConfig config;
  config.irls_iters = 5;
  const auto result = irls_solve(dense_system(A, b), config);
  CHECK(result.v[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(result.v[1] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(result.objective_initial == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(result.objective_final == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("irls_solve walks toward the median of {1,2,10}") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Ones(3, 1);
  Eigen::VectorXd b(3);
  b << 1.0, 2.0, 10.0;
  SeparationConfig config;  // three iterations by default
  const auto result = irls_solve(dense_system(A, b), config);
  CHECK(std::abs(result.v[0] - 2.0) <= 0.25);
  CHECK(result.objective_final <= result.objective_initial * (1.0 + 1e-6));
}

TEST_CASE("irls_solve: zero right-hand side stays at zero") {
  Eigen::MatrixXd A(3, 2);
  A << 1, 2, 3, 4, 5, 6;
  const auto result = irls_solve(dense_system(A, Eigen::VectorXd::Zero(3)), SeparationConfig{});
  CHECK(result.v.isZero(0.0));
  CHECK(result.objective_final == 0.0);
}

TEST_CASE("irls_solve lands near the enumerated L1 optimum") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  SeparationConfig config;
  config.irls_iters = 10;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd A(12, 4);
    Eigen::VectorXd b(12);
    for (Index i = 0; i < 12; ++i) {
      for (Index j = 0; j < 4; ++j) A(i, j) = coeff(rng);
      b[i] = coeff(rng);
    }
    const double optimum = rainsep::testing::l1_optimum_enumerated(A, b);
    const auto result = irls_solve(dense_system(A, b), config);
    CHECK(result.objective_final <= optimum * 1.05);
    CHECK(result.objective_final >= optimum * (1.0 - 1e-9));
  }
}

TEST_CASE("reweighting turns the weighted square loss into the L1 loss") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> res(1e-5, 2.0);  // above the floor
  for (int trial = 0; trial < 20; ++trial) {
    double l1 = 0.0, weighted = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double e = res(rng);
      const double z = std::pow(std::max(e, 1e-6), -0.5);
      l1 += e;
      weighted += (z * e) * (z * e);
    }
    CHECK(weighted == doctest::Approx(l1).epsilon(1e-12));
  }
}

TEST_CASE("separate_layers: empty mask leaves almost nothing in the rain layer") {
  const Mask none = Mask::Constant(64, 64, false);
  const SeparationConfig config;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const Raster clean = rainsep::testing::make_scene(seed, 64, 64);
    const LayerPair layers = separate_layers(clean, none, config);
    double max_rain = 0.0;
    for (const auto& c : layers.rain.channel) max_rain = std::max(max_rain, c.abs().maxCoeff());
    CHECK(max_rain <= 0.02);
  }
}

TEST_CASE("separate_layers recovers a flat background under an exact mask") {
  Raster img = Raster::constant(48, 48, 0.3);
  Mask streak = Mask::Constant(48, 48, false);
  for (Index i = 8; i < 40; ++i) {
    for (auto& c : img.channel) c(i, 24) = 0.7;
    streak(i, 24) = true;
  }
  const LayerPair layers = separate_layers(img, dilate(streak, StructuringElement::disk1()),
                                           SeparationConfig{});
  for (Index i = 8; i < 40; ++i)
    for (int c = 0; c < 3; ++c)
      CHECK(std::abs(layers.background.channel[c](i, 24) - 0.3) <= 0.05);
}

TEST_CASE("layer sum identity is bitwise, clamped or not") {
  const Raster img = rainsep::testing::make_scene(9, 40, 40);
  Mask mask = Mask::Constant(40, 40, false);
  mask.block(10, 10, 12, 3) = true;

  for (bool clamp : {true, false}) {
    SeparationConfig config;
    config.clamp_rain = clamp;
    const LayerPair layers = separate_layers(img, mask, config);
    for (int c = 0; c < 3; ++c) {
      const Plane sum = layers.rain.channel[c] + layers.background.channel[c];
      CHECK((sum == img.channel[c]).all());
      if (clamp) {
        CHECK((layers.rain.channel[c] >= 0.0).all());
        CHECK((layers.rain.channel[c] <= img.channel[c]).all());
      }
    }
  }
}

TEST_CASE("channel order permutes through the separation") {
  const Raster img = rainsep::testing::make_scene(10, 36, 36);
  Raster swapped = img;
  std::swap(swapped.channel[0], swapped.channel[2]);
  Mask mask = Mask::Constant(36, 36, false);
  mask.block(6, 18, 20, 2) = true;

  const SeparationConfig config;
  const LayerPair a = separate_layers(img, mask, config);
  const LayerPair b = separate_layers(swapped, mask, config);
  CHECK((a.rain.channel[0] == b.rain.channel[2]).all());
  CHECK((a.rain.channel[2] == b.rain.channel[0]).all());
  CHECK((a.rain.channel[1] == b.rain.channel[1]).all());
}

TEST_CASE("all-rain mask falls back to anchoring every pixel") {
  const Raster img = rainsep::testing::make_scene(12, 20, 20);
  const Mask all = Mask::Constant(20, 20, true);
  std::vector<ChannelSolveInfo> info;
  const LayerPair layers = separate_layers(img, all, SeparationConfig{}, &info);
  REQUIRE(info.size() == 3);
  for (const auto& channel : info) CHECK(channel.anchored_all_pixels);
  for (int c = 0; c < 3; ++c)
    CHECK(((layers.rain.channel[c] + layers.background.channel[c]) == img.channel[c]).all());
}

TEST_CASE("objective descent on a real separation instance") {
  const Raster clean = rainsep::testing::make_scene(14, 72, 72);
  RainSynthConfig synth;
  synth.seed = 77;
  synth.streak_count = 14;
  const auto rainy = synth_rain(clean, synth);
  const Mask mask = detect_rain(rainy.rainy, DetectionConfig{});

  std::vector<ChannelSolveInfo> info;
  separate_layers(rainy.rainy, mask, SeparationConfig{}, &info);
  REQUIRE(info.size() == 3);
  for (const auto& channel : info)
    CHECK(channel.objective_final <= channel.objective_initial * (1.0 + 1e-6));
}

TEST_CASE("separation config invariants are enforced") {
  SeparationConfig config;
  config.lambda = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = SeparationConfig{};
  config.irls_iters = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = SeparationConfig{};
  config.epsilon_irls = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
