#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace circlepoll {

// Finite counting measure on a circle of given circumference: atoms are kept
// sorted by location in [0, circumference) with strictly positive counts and
// exactly-equal locations merged.
class configuration {
 public:
  struct atom {
    double location;
    long long count;
  };

  explicit configuration(double circumference);
  static configuration from_atoms(double circumference, std::vector<atom> atoms);

  double circumference() const { return ell_; }
  const std::vector<atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  std::size_t distinct_atoms() const { return atoms_.size(); }
  long long total_count() const;

  // In-place mutators used by the simulation loop; the free functions below
  // provide the value-returning variants.
  void insert(double location, long long count = 1);
  void remove_one(std::size_t atom_index);
  void remove_at(double location);  // exact-match location, rejects misses

  // Index of the atom at exactly `location`, or npos.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t find(double location) const;

  bool operator==(const configuration& other) const;

 private:
  double ell_;
  std::vector<atom> atoms_;
};

// Signed counting measure (integer weights, zero weights dropped).
class signed_configuration {
 public:
  struct atom {
    double location;
    long long weight;
  };

  explicit signed_configuration(double circumference);
  static signed_configuration from_atoms(double circumference, std::vector<atom> atoms);

  double circumference() const { return ell_; }
  const std::vector<atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }

 private:
  double ell_;
  std::vector<atom> atoms_;
};

configuration add_atom(const configuration& state, double location);
configuration remove_atom(const configuration& state, double location);
long long total_variation(const configuration& state);
long long total_variation(const signed_configuration& state);

signed_configuration to_signed(const configuration& state);
// a - b as a signed measure; circumferences must match exactly.
signed_configuration difference(const configuration& a, const configuration& b);
signed_configuration signed_sum(const signed_configuration& a, const signed_configuration& b);

// Debug snapshot format: one "location:count" line per atom.
std::string to_text(const configuration& state);
configuration configuration_from_text(double circumference, const std::string& text);

}  // namespace circlepoll
