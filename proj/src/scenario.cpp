#include "circlepoll/scenario.hpp"

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace circlepoll {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double parsed = 0;
  try {
    parsed = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': not a number: '" + value + "'");
  }
  if (pos != value.size()) throw std::invalid_argument("config key '" + key + "': trailing text in '" + value + "'");
  return parsed;
}

long long parse_long(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long parsed = 0;
  try {
    parsed = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': not an integer: '" + value + "'");
  }
  if (pos != value.size()) throw std::invalid_argument("config key '" + key + "': trailing text in '" + value + "'");
  return parsed;
}

}  // namespace

const std::map<std::string, std::string>& scenario_config::known_keys() {
  static const std::map<std::string, std::string> keys = {
      {"lambda", "arrival intensity per unit time"},
      {"s1", "mean interpolling time"},
      {"dist", "interpolling law: exponential | deterministic | gamma"},
      {"gamma_shape", "shape k when dist=gamma (scale resolves to s1/k)"},
      {"r", "scan radius"},
      {"ell", "circle circumference"},
      {"a", "kernel width, or 'auto' = min(ell/2, 2*r)"},
      {"trials", "trial count for property and certificate corpora"},
      {"steps", "number of simulated scans"},
      {"min_cycles", "regeneration cycles required by stationary estimates"},
      {"max_steps", "step budget for regenerative runs"},
      {"lambda_grid", "comma-separated lambda values for sweeps"},
      {"r_grid", "comma-separated scan radii for sweeps"},
      {"theta_grid", "comma-separated transform points for laplace-check"},
      {"tol", "series truncation tolerance for exact operators"},
  };
  return keys;
}

void scenario_config::set(const std::string& key, const std::string& value) {
  if (known_keys().find(key) == known_keys().end()) throw std::invalid_argument("unknown config key '" + key + "'");
  const std::string v = trim(value);
  if (v.empty()) throw std::invalid_argument("config key '" + key + "': empty value");
  values_[key] = v;
}

bool scenario_config::has(const std::string& key) const { return values_.find(key) != values_.end(); }

std::string scenario_config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double scenario_config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_double(key, it->second);
}

long long scenario_config::get_long(const std::string& key, long long fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_long(key, it->second);
}

std::vector<double> scenario_config::get_grid(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> grid;
  std::stringstream stream(it->second);
  std::string piece;
  while (std::getline(stream, piece, ',')) {
    piece = trim(piece);
    if (piece.empty()) throw std::invalid_argument("config key '" + key + "': empty grid entry");
    grid.push_back(parse_double(key, piece));
  }
  if (grid.empty()) throw std::invalid_argument("config key '" + key + "': empty grid");
  return grid;
}

scenario_config scenario_config::from_text(const std::string& text) {
  scenario_config cfg;
  std::stringstream stream(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value, got '" + line +
                                  "'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    cfg.set(key, line.substr(eq + 1));
  }
  return cfg;
}

scenario_config scenario_config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

std::string scenario_config::canonical_text() const {
  std::string text;
  for (const auto& [key, value] : values_) text += key + "=" + value + "\n";
  return text;
}

system_params build_system_params(const scenario_config& cfg) {
  const double lambda = cfg.get_double("lambda", 0.5);
  const double s1 = cfg.get_double("s1", 1.0);
  const double r = cfg.get_double("r", 0.1);
  const double ell = cfg.get_double("ell", 1.0);
  const std::string name = cfg.get_string("dist", "exponential");
  interpolling_distribution dist = interpolling_distribution::exponential(s1);
  if (name == "exponential") {
    // default
  } else if (name == "deterministic") {
    dist = interpolling_distribution::deterministic(s1);
  } else if (name == "gamma") {
    const double shape = cfg.get_double("gamma_shape", 2.0);
    if (!(shape > 0)) throw std::invalid_argument("config key 'gamma_shape': must be positive");
    dist = interpolling_distribution::gamma(shape, s1 / shape);
  } else {
    throw std::invalid_argument("config key 'dist': unknown law '" + name +
                                "' (expected exponential, deterministic or gamma)");
  }
  return system_params(lambda, r, ell, dist);
}

energy_params build_energy_params(const scenario_config& cfg, const system_params& params) {
  const std::string text = cfg.get_string("a", "auto");
  if (text == "auto")
    return energy_params(std::min(params.circumference / 2, 2 * params.scan_radius), params.circumference);
  return energy_params(parse_double("a", text), params.circumference);
}

}  // namespace circlepoll
