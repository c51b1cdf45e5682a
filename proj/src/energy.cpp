#include "circlepoll/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "circlepoll/circle.hpp"

namespace circlepoll {

energy_params::energy_params(double width_, double circumference_) : width(width_), circumference(circumference_) {
  if (!(circumference > 0) || !std::isfinite(circumference))
    throw std::invalid_argument("energy_params: circumference must be positive");
  if (!(width > 0) || !(width <= circumference / 2))
    throw std::invalid_argument("energy_params: width must lie in (0, circumference/2]");
}

namespace {

void check_matching(double ell, const energy_params& p) {
  if (ell != p.circumference) throw std::invalid_argument("energy: circumference mismatch");
}

inline double kernel(double w, double d) { return std::max(w - d, 0.0); }

}  // namespace

double inner_product(const signed_configuration& a, const signed_configuration& b, const energy_params& p) {
  check_matching(a.circumference(), p);
  check_matching(b.circumference(), p);
  const double ell = p.circumference;
  double s = 0;
  for (const auto& x : a.atoms()) {
    double row = 0;
    for (const auto& y : b.atoms()) row += kernel(p.width, arc_distance(x.location, y.location, ell)) * y.weight;
    s += row * x.weight;
  }
  return s;
}

double energy_value(const configuration& z, const energy_params& p) {
  check_matching(z.circumference(), p);
  const auto& atoms = z.atoms();
  const double ell = p.circumference;
  double s = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    s += p.width * static_cast<double>(atoms[i].count) * static_cast<double>(atoms[i].count);
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      const double k = kernel(p.width, arc_distance(atoms[i].location, atoms[j].location, ell));
      if (k > 0) s += 2 * k * static_cast<double>(atoms[i].count) * static_cast<double>(atoms[j].count);
    }
  }
  return s;
}

namespace {

double seminorm_from_square(double q) {
  if (q < -1e-12) throw std::logic_error("seminorm: kernel form produced a negative square");
  return std::sqrt(std::max(q, 0.0));
}

}  // namespace

double seminorm(const signed_configuration& z, const energy_params& p) {
  return seminorm_from_square(inner_product(z, z, p));
}

double seminorm(const configuration& z, const energy_params& p) { return seminorm_from_square(energy_value(z, p)); }

double ball_count_representation(const signed_configuration& z, const energy_params& p, long grid_n) {
  check_matching(z.circumference(), p);
  if (grid_n < 1) throw std::invalid_argument("ball_count_representation: grid_n must be >= 1");
  const double ell = p.circumference;
  const double half = p.width / 2;
  // z(B_{w/2}(u)) is piecewise constant in u with breakpoints at atom +- w/2;
  // integrating midpoint values over a grid refined at every breakpoint is
  // exact.  The uniform grid_n cells are merged in on top.
  std::vector<double> cuts;
  cuts.reserve(2 * z.atoms().size() + static_cast<std::size_t>(grid_n));
  for (const auto& a : z.atoms()) {
    cuts.push_back(wrap_position(a.location - half, ell));
    cuts.push_back(wrap_position(a.location + half, ell));
  }
  for (long i = 0; i < grid_n; ++i) cuts.push_back(ell * static_cast<double>(i) / static_cast<double>(grid_n));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0;
  const std::size_t m = cuts.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double lo = cuts[i];
    const double hi = i + 1 < m ? cuts[i + 1] : cuts[0] + ell;
    if (hi <= lo) continue;
    const double mid = wrap_position((lo + hi) / 2, ell);
    double count = 0;
    for (const auto& a : z.atoms())
      if (arc_distance(mid, a.location, ell) < half) count += static_cast<double>(a.weight);
    total += count * count * (hi - lo) / ell;
  }
  return ell * total;
}

double nn_interpolant(const std::function<double(double)>& f, const configuration& z, double point) {
  if (z.empty()) throw std::invalid_argument("nn_interpolant: empty configuration");
  return f(z.atoms()[nearest_atom_index(z, point)].location);
}

namespace {

double interpolation_sum_impl(double x, const configuration& z, const energy_params& p, const double* ball_radius) {
  check_matching(z.circumference(), p);
  if (z.empty()) throw std::invalid_argument("interpolation_sum: empty configuration");
  const double ell = p.circumference;
  if (ball_radius != nullptr && !(p.width <= std::min(ell / 2, 2 * *ball_radius)))
    throw std::invalid_argument("interpolation_sum: width must be at most min(circumference/2, 2*radius)");
  const auto& atoms = z.atoms();
  const auto cells = voronoi_cells(z);
  double s = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double k = kernel(p.width, arc_distance(x, atoms[i].location, ell));
    if (k == 0) continue;
    const double w = ball_radius == nullptr ? cells[i].length / ell : cell_ball_measure_by_index(i, z, *ball_radius);
    s += k * w;
  }
  return s;
}

}  // namespace

double interpolation_sum(double x, const configuration& z, const energy_params& p) {
  return interpolation_sum_impl(x, z, p, nullptr);
}

double interpolation_sum(double x, const configuration& z, const energy_params& p, double ball_radius) {
  if (!(ball_radius > 0)) throw std::invalid_argument("interpolation_sum: radius must be positive");
  return interpolation_sum_impl(x, z, p, &ball_radius);
}

drift_bound drift_constants(double lambda, double s1, double s2, const energy_params& p) {
  if (!(lambda > 0) || !(s1 > 0) || !(s2 >= s1 * s1))
    throw std::invalid_argument("drift_constants: need lambda > 0, s1 > 0, s2 >= s1^2");
  const double load = lambda * s1;
  const double aa = p.width * p.width / p.circumference;
  return {2 * aa * (1 - load), p.width * (1 + load) + aa * (lambda * lambda * s2 - 2 * load)};
}

}  // namespace circlepoll
