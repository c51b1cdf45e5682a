#pragma once

#include <map>
#include <optional>
#include <string>

#include "circlepoll/energy.hpp"
#include "circlepoll/transition.hpp"

namespace circlepoll {

// Flat key=value experiment description ('#' starts a comment).  Unknown keys
// are rejected; canonical_text() renders sorted key=value lines and parsing
// that text reproduces the identical object.
class scenario_config {
 public:
  scenario_config() = default;
  static scenario_config from_text(const std::string& text);
  static scenario_config from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);  // validates the key
  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_long(const std::string& key, long long fallback) const;
  std::vector<double> get_grid(const std::string& key, const std::vector<double>& fallback) const;

  std::string canonical_text() const;
  bool operator==(const scenario_config& other) const { return values_ == other.values_; }

  static const std::map<std::string, std::string>& known_keys();  // key -> short description

 private:
  std::map<std::string, std::string> values_;
};

// Builds system parameters from keys lambda, s1, dist, gamma_shape, r, ell.
system_params build_system_params(const scenario_config& cfg);
// Resolves key "a" ("auto" or absent = min(ell/2, 2r)).
energy_params build_energy_params(const scenario_config& cfg, const system_params& params);

}  // namespace circlepoll
