#include "fpdg/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "fpdg/errors.hpp"

namespace fpdg::harness {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
  size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)).size() != 0 || !std::isfinite(value)) {
    throw ConfigurationError("config: key '" + key + "' expects a number, got '" + text + "'");
  }
  return value;
}

int to_int(const std::string& key, const std::string& text) {
  const double value = to_double(key, text);
  if (value != std::floor(value) || std::abs(value) > 1e9) {
    throw ConfigurationError("config: key '" + key + "' expects an integer, got '" + text + "'");
  }
  return static_cast<int>(value);
}

Eigen::Vector2d to_vector(const std::string& key, const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::string a, b, extra;
  if (!(in >> a >> b) || (in >> extra)) {
    throw ConfigurationError("config: key '" + key + "' expects two numbers, got '" + text + "'");
  }
  return {to_double(key, a), to_double(key, b)};
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"preset", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.preset = v; }},
      {"degree", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.degree = to_int(k, v); }},
      {"nx", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.nx = to_int(k, v); }},
      {"ny", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.ny = to_int(k, v); }},
      {"tau", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.tau = to_double(k, v); }},
      {"t_start", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.t_start = to_double(k, v); }},
      {"t_end", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.t_end = to_double(k, v); }},
      {"sigma", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sigma = to_double(k, v); }},
      {"m", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.m = to_double(k, v); }},
      {"m_b", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.m_b = to_double(k, v); }},
      {"T", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.T = to_double(k, v); }},
      {"u", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.u = to_vector(k, v); }},
      {"eps_inv", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.eps_inv = to_double(k, v); }},
      {"limiter", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.limiter = parse_on_off(v); }},
      {"output_stride",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.output_stride = to_int(k, v); }},
      {"output_dir", [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
      {"levels", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.levels = to_int(k, v); }},
  };
  return table;
}

}  // namespace

bool parse_on_off(const std::string& text) {
  const std::string v = trim(text);
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigurationError("expected on|off, got '" + text + "'");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [key, setter] : setters()) out.push_back(key);
    return out;
  }();
  return keys;
}

void ExperimentConfig::validate() const {
  if (std::find(kPresetNames.begin(), kPresetNames.end(), preset) == kPresetNames.end()) {
    throw ConfigurationError("config: unknown preset '" + preset + "'");
  }
  if (degree < 1 || degree > 6) throw ConfigurationError("config: degree must lie in [1, 6]");
  if (nx < 1 || ny < 1) throw ConfigurationError("config: nx and ny must be positive");
  if (!(tau > 0)) throw ConfigurationError("config: tau must be positive");
  if (!(t_end >= t_start)) throw ConfigurationError("config: t_end must not precede t_start");
  if (!(sigma > 0)) throw ConfigurationError("config: sigma must be positive");
  if (!(m > 0 && m_b > 0 && T > 0 && eps_inv > 0)) {
    throw ConfigurationError("config: m, m_b, T and eps_inv must be positive");
  }
  if (output_stride < 1) throw ConfigurationError("config: output_stride must be >= 1");
  if (levels < 1) throw ConfigurationError("config: levels must be >= 1");
  if (output_dir.empty()) throw ConfigurationError("config: output_dir must not be empty");
}

ExperimentConfig preset_defaults(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "ou_accuracy") {
    c.tau = 4e-2;
    c.t_start = 1.0;
    c.t_end = 20.0;
    c.output_stride = 5;
  } else if (name == "anisotropic") {
    c.tau = 4e-4;
    c.t_end = 2.0;
    c.output_stride = 50;
  } else if (name == "rfp_reduced") {
    c.nx = c.ny = 128;
    c.tau = 5e-4;
    c.t_end = 20.0;
    c.m = 10.0;
    c.m_b = 2000.0;
    c.u = Eigen::Vector2d(2.5, 0.0);
    c.eps_inv = 1e3;
    c.output_stride = 200;
  } else if (name == "beam_relaxation") {
    c.nx = c.ny = 128;
    c.tau = 5e-4;
    c.t_end = 200.0;
    c.m_b = 100.0;
    c.eps_inv = 1e2;
    c.output_stride = 200;
  } else if (name == "positivity_importance") {
    c.nx = c.ny = 128;
    c.tau = 5e-4;
    c.t_end = 20.0;
    c.m = 30.0;
    c.m_b = 100.0;
    c.eps_inv = 1e2;
    c.output_stride = 200;
  } else if (name == "dr_benchmark") {
    // sizes (nx * 2^l)^2 for l < levels
    c.nx = c.ny = 128;
    c.levels = 5;
  } else {
    throw ConfigurationError("config: unknown preset '" + name + "'");
  }
  return c;
}

ExperimentConfig parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigurationError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigurationError("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    }
    if (value.empty()) throw ConfigurationError("config line " + std::to_string(line_no) + ": empty value");
    entries.emplace_back(key, value);
  }
  const auto preset = std::find_if(entries.begin(), entries.end(), [](const auto& e) { return e.first == "preset"; });
  if (preset == entries.end()) throw ConfigurationError("config: missing required key 'preset'");

  ExperimentConfig c = preset_defaults(preset->second);
  for (const auto& [key, value] : entries) {
    for (const auto& [name, setter] : setters()) {
      if (name == key) setter(c, key, value);
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("config: cannot open '" + path + "'");
  return parse_config(in);
}

}  // namespace fpdg::harness
