#include "circlepoll/configuration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace circlepoll {

namespace {

void check_circumference(double ell) {
  if (!(ell > 0) || !std::isfinite(ell)) throw std::invalid_argument("circumference must be positive and finite");
}

void check_location(double x, double ell) {
  if (!std::isfinite(x) || x < 0 || x >= ell)
    throw std::invalid_argument("atom location must lie in [0, circumference)");
}

}  // namespace

configuration::configuration(double circumference) : ell_(circumference) { check_circumference(ell_); }

configuration configuration::from_atoms(double circumference, std::vector<atom> atoms) {
  configuration out(circumference);
  std::sort(atoms.begin(), atoms.end(), [](const atom& a, const atom& b) { return a.location < b.location; });
  for (const atom& a : atoms) {
    check_location(a.location, circumference);
    if (a.count <= 0) throw std::invalid_argument("atom count must be positive");
    if (!out.atoms_.empty() && out.atoms_.back().location == a.location) {
      out.atoms_.back().count += a.count;
    } else {
      out.atoms_.push_back(a);
    }
  }
  return out;
}

long long configuration::total_count() const {
  long long t = 0;
  for (const atom& a : atoms_) t += a.count;
  return t;
}

void configuration::insert(double location, long long count) {
  check_location(location, ell_);
  if (count <= 0) throw std::invalid_argument("atom count must be positive");
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), location,
                             [](const atom& a, double v) { return a.location < v; });
  if (it != atoms_.end() && it->location == location) {
    it->count += count;
  } else {
    atoms_.insert(it, {location, count});
  }
}

void configuration::remove_one(std::size_t atom_index) {
  if (atom_index >= atoms_.size()) throw std::invalid_argument("remove_one: index out of range");
  if (--atoms_[atom_index].count == 0) atoms_.erase(atoms_.begin() + static_cast<std::ptrdiff_t>(atom_index));
}

void configuration::remove_at(double location) {
  const std::size_t i = find(location);
  if (i == npos) throw std::invalid_argument("remove_at: location is not an atom");
  remove_one(i);
}

std::size_t configuration::find(double location) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), location,
                             [](const atom& a, double v) { return a.location < v; });
  if (it == atoms_.end() || it->location != location) return npos;
  return static_cast<std::size_t>(it - atoms_.begin());
}

bool configuration::operator==(const configuration& other) const {
  if (ell_ != other.ell_ || atoms_.size() != other.atoms_.size()) return false;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].location != other.atoms_[i].location || atoms_[i].count != other.atoms_[i].count) return false;
  return true;
}

signed_configuration::signed_configuration(double circumference) : ell_(circumference) { check_circumference(ell_); }

signed_configuration signed_configuration::from_atoms(double circumference, std::vector<atom> atoms) {
  signed_configuration out(circumference);
  std::sort(atoms.begin(), atoms.end(), [](const atom& a, const atom& b) { return a.location < b.location; });
  for (const atom& a : atoms) {
    check_location(a.location, circumference);
    if (!out.atoms_.empty() && out.atoms_.back().location == a.location) {
      out.atoms_.back().weight += a.weight;
      if (out.atoms_.back().weight == 0) out.atoms_.pop_back();
    } else if (a.weight != 0) {
      out.atoms_.push_back(a);
    }
  }
  return out;
}

configuration add_atom(const configuration& state, double location) {
  configuration out = state;
  out.insert(location);
  return out;
}

configuration remove_atom(const configuration& state, double location) {
  configuration out = state;
  out.remove_at(location);
  return out;
}

long long total_variation(const configuration& state) { return state.total_count(); }

long long total_variation(const signed_configuration& state) {
  long long t = 0;
  for (const auto& a : state.atoms()) t += std::llabs(a.weight);
  return t;
}

signed_configuration to_signed(const configuration& state) {
  std::vector<signed_configuration::atom> atoms;
  atoms.reserve(state.atoms().size());
  for (const auto& a : state.atoms()) atoms.push_back({a.location, a.count});
  return signed_configuration::from_atoms(state.circumference(), std::move(atoms));
}

signed_configuration difference(const configuration& a, const configuration& b) {
  if (a.circumference() != b.circumference())
    throw std::invalid_argument("difference: circumference mismatch");
  std::vector<signed_configuration::atom> atoms;
  atoms.reserve(a.atoms().size() + b.atoms().size());
  for (const auto& x : a.atoms()) atoms.push_back({x.location, x.count});
  for (const auto& x : b.atoms()) atoms.push_back({x.location, -x.count});
  return signed_configuration::from_atoms(a.circumference(), std::move(atoms));
}

signed_configuration signed_sum(const signed_configuration& a, const signed_configuration& b) {
  if (a.circumference() != b.circumference())
    throw std::invalid_argument("signed_sum: circumference mismatch");
  std::vector<signed_configuration::atom> atoms;
  atoms.reserve(a.atoms().size() + b.atoms().size());
  for (const auto& x : a.atoms()) atoms.push_back(x);
  for (const auto& x : b.atoms()) atoms.push_back(x);
  return signed_configuration::from_atoms(a.circumference(), std::move(atoms));
}

std::string to_text(const configuration& state) {
  std::string out;
  char line[64];
  for (const auto& a : state.atoms()) {
    std::snprintf(line, sizeof line, "%.17g:%lld\n", a.location, a.count);
    out += line;
  }
  return out;
}

configuration configuration_from_text(double circumference, const std::string& text) {
  std::vector<configuration::atom> atoms;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("configuration_from_text: missing ':' in line");
    std::size_t pos = 0;
    const double loc = std::stod(line.substr(0, colon), &pos);
    const long long count = std::stoll(line.substr(colon + 1));
    atoms.push_back({loc, count});
  }
  return configuration::from_atoms(circumference, std::move(atoms));
}

}  // namespace circlepoll
