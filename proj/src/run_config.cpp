#include "rainsep/run_config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rainsep {
namespace {

double parse_double(const std::string& key, const std::string& value) {
  size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty())
    throw std::invalid_argument("config: bad numeric value for " + key + ": '" + value + "'");
  return parsed;
}

int parse_int(const std::string& key, const std::string& value) {
  const double d = parse_double(key, value);
  const int i = int(d);
  if (double(i) != d)
    throw std::invalid_argument("config: expected integer for " + key + ": '" + value + "'");
  return i;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: expected boolean for " + key + ": '" + value + "'");
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  const auto end = s.find_last_not_of(" \t\r");
  return begin == std::string::npos ? std::string() : s.substr(begin, end - begin + 1);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "detection.window_side") detection.window_side = parse_int(key, value);
  else if (key == "detection.kmeans_iters") detection.kmeans_iters = parse_int(key, value);
  else if (key == "detection.T1") detection.t1_degrees = parse_double(key, value);
  else if (key == "detection.T2") detection.t2_chroma = parse_double(key, value);
  else if (key == "detection.mu") detection.mu_aspect = parse_double(key, value);
  else if (key == "detection.c") detection.c_scale = parse_double(key, value);
  else if (key == "separation.lambda") separation.lambda = parse_double(key, value);
  else if (key == "separation.eta") separation.eta = parse_double(key, value);
  else if (key == "separation.irls_iters") separation.irls_iters = parse_int(key, value);
  else if (key == "separation.epsilon_irls") separation.epsilon_irls = parse_double(key, value);
  else if (key == "separation.solver_tol") separation.solver_tol = parse_double(key, value);
  else if (key == "separation.clamp_rain") separation.clamp_rain = parse_bool(key, value);
  else if (key == "synth.seed") synth.seed = std::uint64_t(parse_double(key, value));
  else if (key == "synth.streak_count") synth.streak_count = parse_int(key, value);
  else if (key == "synth.angle_mean") synth.angle_mean_degrees = parse_double(key, value);
  else if (key == "synth.angle_jitter") synth.angle_jitter_degrees = parse_double(key, value);
  else if (key == "synth.length_min") synth.length_min = parse_double(key, value);
  else if (key == "synth.length_max") synth.length_max = parse_double(key, value);
  else if (key == "synth.thickness_min") synth.thickness_min = parse_double(key, value);
  else if (key == "synth.thickness_max") synth.thickness_max = parse_double(key, value);
  else if (key == "synth.intensity_min") synth.intensity_min = parse_double(key, value);
  else if (key == "synth.intensity_max") synth.intensity_max = parse_double(key, value);
  else if (key == "synth.blur_sigma") synth.blur_sigma = parse_double(key, value);
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string entry = trim(line);
    if (entry.empty() || entry[0] == '#') continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: missing '=' at " + path + ":" +
                                  std::to_string(line_no));
    set(trim(entry.substr(0, eq)), trim(entry.substr(eq + 1)));
  }
}

void RunConfig::validate() const {
  detection.validate();
  separation.validate();
  synth.validate();
}

}  // namespace rainsep
