#pragma once

#include <functional>

#include "circlepoll/configuration.hpp"

namespace circlepoll {

// Width parameter of the triangular kernel (w - d)_+ used by the quadratic
// energy form; constrained to 0 < width <= circumference/2 so that the kernel
// equals the overlap length of two balls of diameter `width`.
struct energy_params {
  double width;
  double circumference;
  energy_params(double width_, double circumference_);
};

// <a, b> = sum over atom pairs of (width - distance)_+ * weight_a * weight_b.
double inner_product(const signed_configuration& a, const signed_configuration& b, const energy_params& p);

// <z, z> for a counting measure (uses distinct atoms with multiplicities).
double energy_value(const configuration& z, const energy_params& p);

// sqrt(<z, z>); a value of <z, z> below -1e-12 indicates a broken kernel and
// aborts via std::logic_error.
double seminorm(const signed_configuration& z, const energy_params& p);
double seminorm(const configuration& z, const energy_params& p);

// Independent route to <z, z>: circumference * E[ z(B_{w/2}(U))^2 ] with U
// uniform, integrated on a grid refined at every breakpoint of the
// piecewise-constant integrand (exact up to roundoff; grid_n extra uniform
// cells are merged in for robustness).
double ball_count_representation(const signed_configuration& z, const energy_params& p, long grid_n);

// Value of f at the atom nearest to z; exact midpoint ties take the clockwise
// atom.  z exactly on an atom returns f at that atom.
double nn_interpolant(const std::function<double(double)>& f, const configuration& z, double point);

// sum over atoms y of (width - d(x, y))_+ * m(cell(y)); equals
// width^2/circumference whenever z has atoms at x-width, x, x+width.
double interpolation_sum(double x, const configuration& z, const energy_params& p);

// Same sum with cell measures replaced by m(ball_radius-ball ∩ cell); at
// width <= min(circumference/2, 2*ball_radius) and x an atom of z the value
// is at least width^2/circumference.
double interpolation_sum(double x, const configuration& z, const energy_params& p, double ball_radius);

// One-step energy change is bounded by -c1 * total_count + c2 for the greedy
// scan dynamics; c1 > 0 exactly when lambda * s1 < 1.
struct drift_bound {
  double c1;
  double c2;
};
drift_bound drift_constants(double lambda, double s1, double s2, const energy_params& p);

}  // namespace circlepoll
