#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "circlepoll/transition.hpp"

namespace circlepoll {

// Per-step randomness is consumed in a fixed order (interval, batch size,
// locations, scan location, tie coin), so a path is a pure function of
// (params, seed, initial state).
struct path_record {
  std::uint64_t seed = 0;
  long steps = 0;
  std::vector<long long> population;   // steps + 1 entries, post-scan counts
  std::vector<long> arrivals;          // per step
  std::vector<unsigned char> served;   // per step
  std::map<long, configuration> snapshots;
};

path_record run_path(const system_params& params, long steps, std::uint64_t seed, const configuration& initial,
                     const std::vector<long>& snapshot_steps = {});

// Regenerative estimate over cycles delimited by the empty state just after a
// scan.  `complete` reports whether min_cycles finished before max_steps; the
// confidence half-width uses the ratio-estimator variance and needs >= 30
// cycles to be meaningful.
struct stationary_estimate {
  double mean_population = 0;
  double half_width_95 = 0;
  long cycles = 0;
  double cycle_length_mean = 0;
  std::vector<long long> tail_histogram;  // index = population, completed cycles only
  bool complete = false;
  bool approximate = false;  // true for the batch-means fallback
  long steps_used = 0;
};

stationary_estimate estimate_stationary(const system_params& params, long min_cycles, long max_steps,
                                        std::uint64_t seed);

// Fallback for heavy traffic where regenerations are rare: single long run,
// 10% burn-in, 30 batch means.
stationary_estimate batch_means_estimate(const system_params& params, long steps, std::uint64_t seed);

// Scalar single-server queue driven by the same mixed-Poisson arrivals; the
// spatial system at scan radius = circumference/2 reduces to it exactly.
stationary_estimate autonomous_queue_oracle(double lambda, const interpolling_distribution& dist, long steps,
                                            std::uint64_t seed);
std::vector<long long> autonomous_queue_path(double lambda, const interpolling_distribution& dist, long steps,
                                             std::uint64_t seed);

enum class path_functional { population, energy, seminorm, exp_seminorm };

struct mc_estimate {
  double estimate = 0;
  double std_error = 0;
  long reps = 0;
};

// Monte Carlo mean of f(one-step image) - f(state) over independent
// transitions; blocks of replications use decorrelated substreams and a
// deterministic reduction, so the result is thread-count independent.
mc_estimate drift_monte_carlo(const configuration& state, const system_params& params, path_functional f, long reps,
                              std::uint64_t seed, const energy_params* ep = nullptr, double beta = 1.0,
                              int threads = 1);

// Long-run record of (population, scan-success probability) taken just
// before each scan, with regeneration boundaries for cycle-weighted errors.
struct stationary_sample {
  std::vector<std::pair<long long, double>> entries;
  std::vector<std::size_t> cycle_starts;
};
stationary_sample collect_stationary_sample(const system_params& params, long steps, std::uint64_t seed);

// In steady state E[exp(-theta*N)] equals
// Ghat(lambda(1-exp(-theta))) * E[exp(-theta*N) * (1 + (exp(theta)-1) * k)]
// over the pre-scan law; returns the sampled difference and its cycle-based
// standard error.
struct residual_estimate {
  double residual = 0;
  double std_error = 0;
  long cycles = 0;
};
residual_estimate laplace_residual(const system_params& params, double theta, const stationary_sample& sample);

// Least-squares fit of log P(population >= k) against k over populated
// histogram levels; needs at least 5 levels.
struct tail_fit {
  double slope = 0;
  double r_squared = 0;
  long levels = 0;
};
tail_fit tail_geometric_fit(const stationary_estimate& estimate);

// Runs the given system and the full-radius system (scan radius =
// circumference/2) on shared arrival and scan-location streams; the
// full-radius population is a pathwise lower bound.
std::pair<path_record, path_record> run_coupled_paths(const system_params& params, long steps, std::uint64_t seed,
                                                      const configuration& initial);

void write_path_csv(std::ostream& out, const path_record& record);

struct sweep_row {
  double param = 0;
  double mean = 0;
  double half_width = 0;
  double approximation = 0;
  long cycles = 0;
  bool complete = false;
};
void write_sweep_csv(std::ostream& out, const std::string& param_name, const std::vector<sweep_row>& rows);
void write_tail_csv(std::ostream& out, const stationary_estimate& estimate);

// Light-traffic approximation of the stationary mean population.
double light_traffic_mean(const system_params& params);

}  // namespace circlepoll
