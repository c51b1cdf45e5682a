#pragma once

#include <cstddef>
#include <vector>

#include "circlepoll/configuration.hpp"

namespace circlepoll {

// Reduce a coordinate to [0, circumference).
double wrap_position(double x, double circumference);

// Shorter arc length between two points, in [0, circumference/2].
double arc_distance(double x, double y, double circumference);

// Normalized measure of an open ball of the given radius: min(2r/L, 1).
double ball_measure(double radius, double circumference);

// Arc running anticlockwise from `start` for `length`.
struct arc {
  double start;
  double length;
};

// Union of arcs in canonical form: pairwise disjoint, sorted by start.
class arc_set {
 public:
  static arc_set unite(double circumference, const std::vector<arc>& arcs);
  double circumference() const { return ell_; }
  const std::vector<arc>& arcs() const { return arcs_; }
  double total_length() const;
  double measure() const;

 private:
  explicit arc_set(double circumference) : ell_(circumference) {}
  double ell_;
  std::vector<arc> arcs_;
};

// Nearest-atom cells, aligned with state.atoms().  Cell i runs between the
// midpoints toward the two neighbouring atoms; a single atom owns the whole
// circle.  The atom's own location is excluded from candidates when ranking
// other points, i.e. cells tile the circle.
std::vector<arc> voronoi_cells(const configuration& state);

// Normalized measure of (ball of `radius` around the atom) ∩ (its cell).
// `location` must match an atom of `state` exactly.
double cell_ball_measure(double location, const configuration& state, double radius);
double cell_ball_measure_by_index(std::size_t atom_index, const configuration& state, double radius);

// Normalized measure of the union of balls around all atoms (the probability
// that a uniformly chosen scan location sees at least one atom).
double union_balls_measure(const configuration& state, double radius);

// Index of the atom nearest to z; an exact midpoint tie resolves to the
// clockwise (lower-coordinate side) atom.  State must be nonempty.
std::size_t nearest_atom_index(const configuration& state, double z);

}  // namespace circlepoll
