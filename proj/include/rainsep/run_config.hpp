#pragma once

#include "rainsep/detection.hpp"
#include "rainsep/separation.hpp"
#include "rainsep/synthesis.hpp"

#include <string>

namespace rainsep {

/// Bundled pipeline configuration. Defaults reproduce the reference
/// parameter set (7x7 window, T1 = 10, T2 = 0.08, mu = 2, lambda = 0.25,
/// eta = 0.1, 3 IRLS iterations, 100 k-means iterations).
struct RunConfig {
  DetectionConfig detection;
  SeparationConfig separation;
  RainSynthConfig synth;

  /// Applies one `section.name=value` entry; throws std::invalid_argument
  /// for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);

  /// Loads a flat key=value file. Blank lines and lines starting with '#'
  /// are skipped.
  void load_file(const std::string& path);

  void validate() const;
};

}  // namespace rainsep
