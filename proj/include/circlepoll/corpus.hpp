#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "circlepoll/configuration.hpp"
#include "circlepoll/energy.hpp"
#include "circlepoll/transition.hpp"

namespace circlepoll {

// Random instances shared by the property harness, the acceptance suite and
// the CLI commands.
configuration random_configuration(std::mt19937_64& rng, double circumference, int max_atoms, int max_count);
signed_configuration random_signed_configuration(std::mt19937_64& rng, double circumference, int max_atoms,
                                                 int max_weight);

struct check_result {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst = 0;  // signed margin of the worst case: negative means violated
  std::string example;
  bool passed() const { return failures == 0; }
};

struct check_options {
  std::uint64_t seed = 20260814;
  std::size_t trials = 10000;
  double circumference = 1.0;
  int threads = 1;
  // Test hook: replaces the clamped kernel by (width - distance) without the
  // positive part, which must make the positivity check fail.
  bool corrupt_kernel = false;
};

// Geometry/seminorm/interpolation property corpus; every result must pass on
// a healthy build.
std::vector<check_result> run_lemma_checks(const check_options& opts);

// Energy drift certificate at one parameter point: evaluates the exact drift
// on structured and random configurations and compares with the certified
// line -c1 * population + c2.
struct drift_certificate {
  drift_bound bound;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double min_margin = 0;  // min over corpus of (-c1*n + c2 + tolerance) - drift
  std::string worst_example;
};
drift_certificate run_drift_certificate(const system_params& params, const energy_params& ep, std::size_t trials,
                                        std::uint64_t seed, int threads = 1);

// Exact population drift at a single cluster of n units, together with the
// closed lower bound lambda*s1 - 1 + G(0)*(1 - ball measure); positive values
// show the total count itself admits no negative drift certificate.
struct cluster_drift {
  double drift;
  double lower_bound;
};
cluster_drift population_drift_at_cluster(const system_params& params, long long n);

}  // namespace circlepoll
