#include "circlepoll/circle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace circlepoll {

namespace {

void require_circumference(double ell) {
  if (!(ell > 0) || !std::isfinite(ell)) throw std::invalid_argument("circumference must be positive and finite");
}

void require_radius(double r) {
  if (!(r > 0) || !std::isfinite(r)) throw std::invalid_argument("ball radius must be positive and finite");
}

}  // namespace

double wrap_position(double x, double ell) {
  require_circumference(ell);
  double r = std::fmod(x, ell);
  if (r < 0) r += ell;
  if (r >= ell) r = 0;  // fmod can return ell after the negative adjustment
  return r;
}

double arc_distance(double x, double y, double ell) {
  require_circumference(ell);
  double d = std::fabs(x - y);
  d = std::fmod(d, ell);
  return std::min(d, ell - d);
}

double ball_measure(double radius, double ell) {
  require_circumference(ell);
  require_radius(radius);
  return std::min(2 * radius / ell, 1.0);
}

arc_set arc_set::unite(double ell, const std::vector<arc>& arcs) {
  require_circumference(ell);
  // Work on half-open intervals of [0, ell): wrapped arcs are split, then a
  // sort-and-sweep merge joins everything that overlaps or touches.
  std::vector<std::pair<double, double>> iv;
  iv.reserve(arcs.size() + 1);
  for (const arc& a : arcs) {
    if (!(a.length >= 0) || !std::isfinite(a.length) || !std::isfinite(a.start))
      throw std::invalid_argument("arc with negative or non-finite extent");
    if (a.length == 0) continue;
    if (a.length >= ell) {
      iv.emplace_back(0.0, ell);
      continue;
    }
    const double s = wrap_position(a.start, ell);
    const double e = s + a.length;
    if (e <= ell) {
      iv.emplace_back(s, e);
    } else {
      iv.emplace_back(s, ell);
      iv.emplace_back(0.0, e - ell);
    }
  }
  arc_set out(ell);
  if (iv.empty()) return out;
  std::sort(iv.begin(), iv.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& [lo, hi] : iv) {
    if (!merged.empty() && lo <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, hi);
    } else {
      merged.emplace_back(lo, hi);
    }
  }
  if (merged.size() == 1 && merged.front().first == 0 && merged.front().second >= ell) {
    out.arcs_.push_back({0.0, ell});
    return out;
  }
  // Re-join across the wrap point so the canonical form has one arc there.
  if (merged.size() >= 2 && merged.front().first == 0 && merged.back().second == ell) {
    const double head = merged.front().second;
    const double tail_start = merged.back().first;
    merged.erase(merged.begin());
    merged.pop_back();
    merged.emplace_back(tail_start, tail_start + (ell - tail_start) + head);  // extends past ell on purpose
  }
  for (const auto& [lo, hi] : merged) out.arcs_.push_back({lo, hi - lo});
  return out;
}

double arc_set::total_length() const {
  double t = 0;
  for (const arc& a : arcs_) t += a.length;
  return std::min(t, ell_);
}

double arc_set::measure() const { return total_length() / ell_; }

namespace {

// Gap (arc length) from atom i anticlockwise to the next atom; a single atom
// wraps to itself with gap = circumference.
double gap_after(const configuration& state, std::size_t i) {
  const auto& atoms = state.atoms();
  const double ell = state.circumference();
  if (atoms.size() == 1) return ell;
  const std::size_t j = (i + 1) % atoms.size();
  double g = atoms[j].location - atoms[i].location;
  if (j == 0) g += ell;
  return g;
}

}  // namespace

std::vector<arc> voronoi_cells(const configuration& state) {
  if (state.empty()) throw std::invalid_argument("voronoi_cells: empty configuration");
  const auto& atoms = state.atoms();
  const double ell = state.circumference();
  const std::size_t k = atoms.size();
  std::vector<arc> cells(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double g_prev = gap_after(state, (i + k - 1) % k);
    const double g_next = gap_after(state, i);
    cells[i] = {wrap_position(atoms[i].location - g_prev / 2, ell), (g_prev + g_next) / 2};
  }
  return cells;
}

double cell_ball_measure_by_index(std::size_t atom_index, const configuration& state, double radius) {
  require_radius(radius);
  const auto& atoms = state.atoms();
  if (atom_index >= atoms.size()) throw std::invalid_argument("cell_ball_measure: atom index out of range");
  const std::size_t k = atoms.size();
  const double ell = state.circumference();
  // Ball and cell are both arcs around the atom, so the intersection extends
  // min(radius, half-gap) on each side.
  const double g_prev = gap_after(state, (atom_index + k - 1) % k);
  const double g_next = gap_after(state, atom_index);
  return (std::min(radius, g_prev / 2) + std::min(radius, g_next / 2)) / ell;
}

double cell_ball_measure(double location, const configuration& state, double radius) {
  const std::size_t i = state.find(location);
  if (i == configuration::npos) throw std::invalid_argument("cell_ball_measure: location is not an atom");
  return cell_ball_measure_by_index(i, state, radius);
}

double union_balls_measure(const configuration& state, double radius) {
  require_radius(radius);
  if (state.empty()) return 0;
  const double ell = state.circumference();
  std::vector<arc> balls;
  balls.reserve(state.atoms().size());
  const double len = std::min(2 * radius, ell);
  for (const auto& a : state.atoms()) balls.push_back({wrap_position(a.location - radius, ell), len});
  return arc_set::unite(ell, balls).measure();
}

std::size_t nearest_atom_index(const configuration& state, double z) {
  if (state.empty()) throw std::invalid_argument("nearest_atom_index: empty configuration");
  const auto& atoms = state.atoms();
  const double ell = state.circumference();
  const std::size_t k = atoms.size();
  if (k == 1) return 0;
  const double zz = wrap_position(z, ell);
  auto it = std::lower_bound(atoms.begin(), atoms.end(), zz,
                             [](const configuration::atom& a, double v) { return a.location < v; });
  const std::size_t succ = it == atoms.end() ? 0 : static_cast<std::size_t>(it - atoms.begin());
  const std::size_t pred = (succ + k - 1) % k;
  const double dp = arc_distance(zz, atoms[pred].location, ell);
  const double ds = arc_distance(zz, atoms[succ].location, ell);
  // Exact tie: clockwise neighbour wins.
  return dp <= ds ? pred : succ;
}

}  // namespace circlepoll
