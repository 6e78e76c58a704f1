#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fpdg::harness {

inline const std::vector<std::string> kPresetNames = {"ou_accuracy",    "anisotropic",           "rfp_reduced",
                                                      "beam_relaxation", "positivity_importance", "dr_benchmark"};

/// Everything a preset run needs. Defaults are filled from the preset and
/// then overridden key by key from a config file.
struct ExperimentConfig {
  std::string preset;
  int degree = 2;
  int nx = 64;
  int ny = 64;
  double tau = 1e-2;
  double t_start = 0.0;
  double t_end = 1.0;
  double sigma = 1.0;

  double m = 1.0;
  double m_b = 1.0;
  double T = 1.0;
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
  double eps_inv = 1.0;

  bool limiter = true;
  int output_stride = 1;
  std::string output_dir = "out";

  /// Refinement ladder length for accuracy presets (1 = no table).
  int levels = 1;

  void validate() const;
};

/// Preset defaults. Throws ConfigurationError for an unknown name.
ExperimentConfig preset_defaults(const std::string& name);

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// skipped. The `preset` key selects the defaults; every other key
/// overrides one field. Unknown or repeated keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Recognised keys, in declaration order.
const std::vector<std::string>& config_keys();

bool parse_on_off(const std::string& text);

}  // namespace fpdg::harness
