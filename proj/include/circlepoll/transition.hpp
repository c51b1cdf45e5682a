#pragma once

#include <functional>
#include <random>
#include <vector>

#include "circlepoll/configuration.hpp"
#include "circlepoll/energy.hpp"
#include "circlepoll/interpolling.hpp"

namespace circlepoll {

// Arrival rate, scan radius, circle size and interpolling law for one system.
struct system_params {
  double lambda;
  double scan_radius;
  double circumference;
  interpolling_distribution dist;
  system_params(double lambda_, double scan_radius_, double circumference_, interpolling_distribution dist_);
  double load() const { return lambda * dist.mean(); }  // lambda * s1
};

// One inter-scan interval: number of arrivals and their uniform locations.
struct arrival_batch {
  double interval;
  std::vector<double> locations;
};
arrival_batch sample_interarrival_batch(const system_params& params, std::mt19937_64& rng);

// Greedy scan at a uniform location: the nearest atom within the scan radius
// loses one unit; exact distance ties between the two candidate atoms are
// broken by a fair coin.  Value-returning; poll_in_place is the simulator's
// mutating variant and reports whether a unit was served.
configuration sample_poll(const configuration& state, const system_params& params, std::mt19937_64& rng);
bool poll_in_place(configuration& state, double scan_location, const system_params& params, std::mt19937_64& tie_rng);

// Exact law of the post-scan state: one outcome per distinct atom with
// probability m(ball ∩ cell), plus the unchanged state with the no-service
// probability 1 - union_balls_measure.
struct poll_outcome {
  configuration state;
  double probability;
};
struct poll_outcomes {
  std::vector<poll_outcome> entries;  // last entry is the no-service branch
  double service_mass() const;
};
poll_outcomes enumerate_poll_outcomes(const configuration& state, const system_params& params);

// E[f(state after one scan)], by outcome enumeration.
double apply_polling_operator(const std::function<double(const configuration&)>& f, const configuration& state,
                              const system_params& params);

// Functionals the arrival/step operators evaluate exactly.
enum class observable { unit, population, scan_success, energy };

// E[f(state plus one inter-scan arrival batch)]: mixed-Poisson series over
// the batch size with exact inner expectations, truncated at cumulative mass
// 1 - tol and renormalized over the retained mass.  `energy` requires
// energy_params.
double apply_arrival_operator(observable f, const configuration& state, const system_params& params, double tol,
                              const energy_params* ep = nullptr);

// E[f(state after arrivals followed by one scan)] for f in {unit, population,
// energy}; exact (the sampled counterpart is sample_interarrival_batch
// followed by sample_poll).
double one_step_expectation(observable f, const configuration& state, const system_params& params, double tol,
                            const energy_params* ep = nullptr);

// Exact one-step change of the total count: lambda*s1 - 1 +
// (1 - union_balls_measure(state)) * E[exp(-lambda * m(ball) * S)].
double population_drift(const configuration& state, const system_params& params);

// Exact one-step change of the energy <z, z>; always at most
// -c1 * total_count + c2 for the constants from drift_constants.
double energy_drift(const configuration& state, const system_params& params, const energy_params& ep);

// Kernel-weighted service measure sum over distinct atoms of
// <z, atom> * m(ball ∩ cell), and its exact expectation after one arrival
// batch (the cross term of the energy drift).
double poll_cross_term(const configuration& state, const system_params& params, const energy_params& ep);
double expected_poll_cross_term(const configuration& state, const system_params& params, const energy_params& ep);

// Population threshold above which the seminorm itself has uniformly negative
// one-step drift (at circumference 1), together with the guaranteed margin.
struct drift_margin {
  long long threshold;
  double alpha;
};
drift_margin seminorm_drift_margin(const system_params& params, const energy_params& ep);

}  // namespace circlepoll
