#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "circlepoll/circle.hpp"
#include "circlepoll/parallel.hpp"
#include "circlepoll/transition.hpp"
#include "doctest.h"

using namespace circlepoll;

namespace {

configuration make_config(std::initializer_list<configuration::atom> atoms, double ell = 1.0) {
  return configuration::from_atoms(ell, atoms);
}

configuration random_config(std::mt19937_64& rng, int max_atoms, int max_count) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> n(0, max_atoms);
  std::uniform_int_distribution<long long> c(1, max_count);
  configuration z(1.0);
  const int k = n(rng);
  for (int i = 0; i < k; ++i) z.insert(u(rng), c(rng));
  return z;
}

}  // namespace

TEST_CASE("system_params validation") {
  const auto dist = interpolling_distribution::exponential(1.0);
  CHECK_NOTHROW(system_params(0.5, 0.1, 1.0, dist));
  CHECK_THROWS_AS(system_params(0.0, 0.1, 1.0, dist), std::invalid_argument);
  CHECK_THROWS_AS(system_params(0.5, 0.0, 1.0, dist), std::invalid_argument);
  CHECK_THROWS_AS(system_params(0.5, 0.1, 0.0, dist), std::invalid_argument);
  CHECK(system_params(0.5, 0.1, 1.0, dist).load() == doctest::Approx(0.5));
}

TEST_CASE("interarrival batches have the right intensity and support") {
  const system_params params(0.7, 0.1, 2.0, interpolling_distribution::deterministic(1.5));
  std::mt19937_64 rng = par::substream_rng(101, 0);
  const long reps = 40000;
  double count_sum = 0;
  for (long i = 0; i < reps; ++i) {
    const arrival_batch batch = sample_interarrival_batch(params, rng);
    CHECK(batch.interval == 1.5);
    for (const double x : batch.locations) {
      CHECK(x >= 0.0);
      CHECK(x < 2.0);
    }
    count_sum += static_cast<double>(batch.locations.size());
  }
  const double mu = 0.7 * 1.5;
  const double se = std::sqrt(mu / static_cast<double>(reps));
  CHECK(std::abs(count_sum / static_cast<double>(reps) - mu) < 4 * se);
}

TEST_CASE("greedy scan serves the nearest atom within reach") {
  const system_params params(0.5, 0.1, 1.0, interpolling_distribution::exponential(1.0));
  std::mt19937_64 tie = par::substream_rng(102, 0);

  configuration z = make_config({{0.2, 2}, {0.8, 1}});
  CHECK(poll_in_place(z, 0.25, params, tie));
  CHECK(z.atoms()[0].count == 1);

  configuration unchanged = make_config({{0.2, 2}, {0.8, 1}});
  CHECK_FALSE(poll_in_place(unchanged, 0.5, params, tie));  // nearest atom is 0.3 away, radius 0.1
  CHECK(unchanged == make_config({{0.2, 2}, {0.8, 1}}));

  configuration gone = make_config({{0.2, 2}, {0.8, 1}});
  CHECK(poll_in_place(gone, 0.85, params, tie));
  CHECK(gone == make_config({{0.2, 2}}));

  configuration empty(1.0);
  CHECK_FALSE(poll_in_place(empty, 0.5, params, tie));
}

TEST_CASE("scan reach is clamped at half the circumference") {
  const auto dist = interpolling_distribution::exponential(1.0);
  std::mt19937_64 tie = par::substream_rng(103, 0);
  configuration z = make_config({{0.9, 1}});
  CHECK(poll_in_place(z, 0.4, system_params(0.5, 10.0, 1.0, dist), tie));  // distance 0.5 <= min(10, 1/2)
  configuration out_of_reach = make_config({{0.9, 1}});
  CHECK_FALSE(poll_in_place(out_of_reach, 0.4, system_params(0.5, 0.45, 1.0, dist), tie));
}

TEST_CASE("exact distance ties flip a fair coin") {
  // Dyadic coordinates make both distances exactly 0.25.
  const system_params params(0.5, 0.3, 1.0, interpolling_distribution::exponential(1.0));
  std::mt19937_64 tie = par::substream_rng(104, 0);
  const long reps = 20000;
  long low_served = 0;
  for (long i = 0; i < reps; ++i) {
    configuration z = make_config({{0.25, 1}, {0.75, 1}});
    REQUIRE(poll_in_place(z, 0.5, params, tie));
    if (z.find(0.25) == configuration::npos) ++low_served;
  }
  const double se = std::sqrt(0.25 * static_cast<double>(reps));
  CHECK(low_served > 0);
  CHECK(low_served < reps);
  CHECK(std::abs(static_cast<double>(low_served) - reps / 2.0) < 4 * se);

  // Same tie stream, same decisions.
  std::mt19937_64 t1 = par::substream_rng(105, 0), t2 = par::substream_rng(105, 0);
  for (int i = 0; i < 50; ++i) {
    configuration z1 = make_config({{0.25, 1}, {0.75, 1}});
    configuration z2 = make_config({{0.25, 1}, {0.75, 1}});
    poll_in_place(z1, 0.5, params, t1);
    poll_in_place(z2, 0.5, params, t2);
    CHECK(z1 == z2);
  }
}

TEST_CASE("poll outcome enumeration is a probability law") {
  const system_params params(0.5, 0.1, 1.0, interpolling_distribution::exponential(1.0));
  const configuration z = make_config({{0.0, 1}, {0.5, 3}});
  const poll_outcomes out = enumerate_poll_outcomes(z, params);
  REQUIRE(out.entries.size() == 3);
  CHECK(out.entries[0].probability == doctest::Approx(0.2));
  CHECK(out.entries[1].probability == doctest::Approx(0.2));
  CHECK(out.entries[2].probability == doctest::Approx(0.6));
  CHECK(out.entries[2].state == z);
  CHECK(out.service_mass() == doctest::Approx(union_balls_measure(z, 0.1)));
  CHECK(out.entries[0].state.total_count() == 3);

  std::mt19937_64 rng(106);
  for (int trial = 0; trial < 200; ++trial) {
    configuration state = random_config(rng, 8, 4);
    const poll_outcomes law = enumerate_poll_outcomes(state, params);
    double mass = 0;
    for (const auto& entry : law.entries) mass += entry.probability;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("polling operator: population and energy identities") {
  const system_params params(0.5, 0.13, 1.0, interpolling_distribution::exponential(1.0));
  const energy_params ep(0.21, 1.0);
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 100; ++trial) {
    configuration z = random_config(rng, 7, 3);
    const double sm = enumerate_poll_outcomes(z, params).service_mass();
    const double pop = apply_polling_operator(
        [](const configuration& c) { return static_cast<double>(c.total_count()); }, z, params);
    CHECK(pop == doctest::Approx(static_cast<double>(z.total_count()) - sm).epsilon(1e-12));

    const double after = apply_polling_operator([&](const configuration& c) { return energy_value(c, ep); }, z,
                                                params);
    const double expected = energy_value(z, ep) - 2 * poll_cross_term(z, params, ep) + ep.width * sm;
    CHECK(after == doctest::Approx(expected).epsilon(1e-11));
  }
}

TEST_CASE("arrival operator: unit mass and mean population") {
  std::mt19937_64 rng(108);
  const std::vector<interpolling_distribution> dists = {
      interpolling_distribution::exponential(1.0), interpolling_distribution::deterministic(1.0),
      interpolling_distribution::gamma(2.0, 0.5), interpolling_distribution::empirical({0.4, 1.2, 1.4})};
  for (const auto& dist : dists) {
    const system_params params(0.6, 0.1, 1.0, dist);
    for (int trial = 0; trial < 10; ++trial) {
      const configuration z = random_config(rng, 6, 3);
      CHECK(apply_arrival_operator(observable::unit, z, params, 1e-10) == doctest::Approx(1.0).epsilon(1e-9));
      const double pop = apply_arrival_operator(observable::population, z, params, 1e-12);
      CHECK(pop == doctest::Approx(static_cast<double>(z.total_count()) + params.load()).epsilon(1e-8));
    }
  }
  const configuration z = make_config({{0.5, 1}});
  const system_params params(0.5, 0.1, 1.0, dists[0]);
  CHECK_THROWS_AS(apply_arrival_operator(observable::population, z, params, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_arrival_operator(observable::energy, z, params, 1e-10), std::invalid_argument);
}

TEST_CASE("arrival operator: scan success frozen value and transform identity") {
  // One atom, radius 0.1: covered = 0.2; exponential interval at lambda = 0.5
  // gives a geometric batch with q = 1/3, so the scan succeeds with
  // 1 - 0.8 * (2/3)/(1 - 0.8/3) = 3/11.
  const system_params params(0.5, 0.1, 1.0, interpolling_distribution::exponential(1.0));
  const configuration z = make_config({{0.3, 1}});
  const double success = apply_arrival_operator(observable::scan_success, z, params, 1e-12);
  CHECK(success == doctest::Approx(3.0 / 11).epsilon(1e-9));

  // P(scan misses) after arrivals equals (1 - covered) * M0(lambda * ball).
  std::mt19937_64 rng(109);
  for (const auto& dist :
       {interpolling_distribution::exponential(0.8), interpolling_distribution::deterministic(1.2),
        interpolling_distribution::gamma(3.0, 0.3)}) {
    const system_params p2(0.9, 0.07, 1.0, dist);
    for (int trial = 0; trial < 10; ++trial) {
      const configuration state = random_config(rng, 6, 3);
      const double covered = union_balls_measure(state, p2.scan_radius);
      const double miss = (1 - covered) * dist.damped_moment(0, p2.lambda * ball_measure(p2.scan_radius, 1.0));
      CHECK(1 - apply_arrival_operator(observable::scan_success, state, p2, 1e-12) ==
            doctest::Approx(miss).epsilon(1e-8));
    }
  }
}

TEST_CASE("arrival operator: energy matches the closed form in every family") {
  std::mt19937_64 rng(110);
  const std::vector<interpolling_distribution> dists = {
      interpolling_distribution::exponential(1.1), interpolling_distribution::deterministic(0.9),
      interpolling_distribution::gamma(2.0, 0.7), interpolling_distribution::empirical({0.4, 1.2, 2.1})};
  for (const auto& dist : dists) {
    const system_params params(0.6, 0.1, 1.0, dist);
    const energy_params ep(0.2, 1.0);
    const double s1 = dist.mean(), s2 = dist.second_moment();
    for (int trial = 0; trial < 10; ++trial) {
      const configuration z = random_config(rng, 6, 3);
      const double h = energy_value(z, ep);
      const double tv = static_cast<double>(z.total_count());
      const double aa = ep.width * ep.width;  // kernel mass on the unit circle
      const double closed = h + 2 * params.lambda * s1 * aa * tv + params.lambda * s1 * ep.width +
                            params.lambda * params.lambda * s2 * aa;
      const double series = apply_arrival_operator(observable::energy, z, params, 1e-12, &ep);
      CHECK(series == doctest::Approx(closed).epsilon(1e-7));
    }
  }
}

TEST_CASE("population drift: frozen counterexample at heavy deterministic load") {
  const system_params params(0.95, 0.05, 1.0, interpolling_distribution::deterministic(1.0));
  configuration cluster(1.0);
  cluster.insert(0.0, 100);
  const double drift = population_drift(cluster, params);
  CHECK(drift == doctest::Approx(-0.05 + 0.9 * std::exp(-0.095)).epsilon(1e-12));
  CHECK(drift > 0.29);  // the count grows although the load is below one
  CHECK(drift == doctest::Approx(0.7684356).epsilon(1e-6));
}

TEST_CASE("population drift agrees with the one-step expectation route") {
  std::mt19937_64 rng(111);
  for (const auto& dist : {interpolling_distribution::exponential(1.0), interpolling_distribution::gamma(2.0, 0.5)}) {
    const system_params params(0.7, 0.12, 1.0, dist);
    for (int trial = 0; trial < 20; ++trial) {
      const configuration z = random_config(rng, 8, 3);
      const double series = apply_arrival_operator(observable::population, z, params, 1e-12) -
                            apply_arrival_operator(observable::scan_success, z, params, 1e-12);
      const double closed = one_step_expectation(observable::population, z, params, 1e-12);
      CHECK(series == doctest::Approx(closed).epsilon(1e-8));
      CHECK(closed == doctest::Approx(static_cast<double>(z.total_count()) + population_drift(z, params)));
    }
  }
  const configuration z = make_config({{0.5, 1}});
  const system_params params(0.5, 0.1, 1.0, interpolling_distribution::exponential(1.0));
  CHECK_THROWS_AS(one_step_expectation(observable::scan_success, z, params, 1e-10), std::invalid_argument);
  CHECK(one_step_expectation(observable::unit, z, params, 1e-10) == 1.0);
}

TEST_CASE("expected service cross term: vanishing arrival rate recovers the static value") {
  std::mt19937_64 rng(112);
  for (const auto& dist : {interpolling_distribution::exponential(1.0), interpolling_distribution::deterministic(1.0),
                           interpolling_distribution::gamma(2.0, 0.5)}) {
    for (int trial = 0; trial < 15; ++trial) {
      configuration z = random_config(rng, 8, 3);
      if (z.empty()) z.insert(0.5);
      const system_params params(1e-12, 0.13, 1.0, dist);
      const energy_params ep(0.2, 1.0);
      const double expect = expected_poll_cross_term(z, params, ep);
      const double untouched = poll_cross_term(z, params, ep);
      CHECK(expect == doctest::Approx(untouched).epsilon(1e-9));
    }
  }
}

namespace {

// Brute-force conditional expectation of the post-arrival service cross term
// for a deterministic interval at tiny rate: condition on the batch size and
// integrate the arrival locations on midpoint grids.  Three or more arrivals
// contribute O(1e-6) and are dropped; the comparison tolerance covers that.
double cross_term_oracle(const configuration& z, const system_params& params, const energy_params& ep) {
  const double t0 = poll_cross_term(z, params, ep);
  const long n1 = 20000;
  double t1 = 0;
  for (long i = 0; i < n1; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n1);
    t1 += poll_cross_term(add_atom(z, u), params, ep);
  }
  t1 /= static_cast<double>(n1);
  const long n2 = 400;
  double t2 = 0;
  for (long i = 0; i < n2; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n2);
    const configuration zu = add_atom(z, u);
    for (long j = 0; j < n2; ++j) {
      const double v = (static_cast<double>(j) + 0.5) / static_cast<double>(n2);
      t2 += poll_cross_term(add_atom(zu, v), params, ep);
    }
  }
  t2 /= static_cast<double>(n2) * static_cast<double>(n2);
  const double p0 = params.dist.mixed_poisson_pmf(params.lambda, 0);
  const double p1 = params.dist.mixed_poisson_pmf(params.lambda, 1);
  const double p2 = params.dist.mixed_poisson_pmf(params.lambda, 2);
  return p0 * t0 + p1 * t1 + p2 * t2;
}

}  // namespace

TEST_CASE("expected service cross term: low-rate conditional oracle") {
  const system_params params(0.02, 0.12, 1.0, interpolling_distribution::deterministic(1.0));
  const energy_params ep(0.2, 1.0);
  const std::vector<configuration> cases = {configuration(1.0), make_config({{0.3, 2}}),
                                            make_config({{0.1, 1}, {0.45, 3}})};
  for (const configuration& z : cases) {
    const double exact = expected_poll_cross_term(z, params, ep);
    const double oracle = cross_term_oracle(z, params, ep);
    CHECK(std::abs(exact - oracle) < 5e-6 * (1 + std::abs(oracle)));
  }
}

TEST_CASE("expected service cross term: Monte Carlo over full batches") {
  struct setting {
    interpolling_distribution dist;
    double lambda;
  };
  const std::vector<setting> settings = {{interpolling_distribution::exponential(1.0), 0.7},
                                         {interpolling_distribution::deterministic(1.0), 0.9},
                                         {interpolling_distribution::gamma(2.0, 0.5), 1.3}};
  const std::vector<configuration> cases = {configuration(1.0), make_config({{0.2, 1}, {0.55, 2}}),
                                            make_config({{0.05, 1}, {0.5, 1}, {0.52, 4}})};
  for (const setting& s : settings) {
    const system_params params(s.lambda, 0.15, 1.0, s.dist);
    const energy_params ep(0.25, 1.0);
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
      const configuration& z = cases[ci];
      const double exact = expected_poll_cross_term(z, params, ep);
      std::mt19937_64 rng = par::substream_rng(113, ci);
      const long reps = 400000;
      double sum = 0, sumsq = 0;
      for (long i = 0; i < reps; ++i) {
        configuration post = z;
        const arrival_batch batch = sample_interarrival_batch(params, rng);
        for (const double x : batch.locations) post.insert(x);
        const double t = poll_cross_term(post, params, ep);
        sum += t;
        sumsq += t * t;
      }
      const double mean = sum / static_cast<double>(reps);
      const double var = std::max(0.0, (sumsq - static_cast<double>(reps) * mean * mean) /
                                           static_cast<double>(reps - 1));
      const double se = std::sqrt(var / static_cast<double>(reps));
      CHECK(std::abs(exact - mean) < 4 * se + 1e-9);
    }
  }
}

TEST_CASE("energy drift stays under the certified line on random states") {
  std::mt19937_64 rng(114);
  const system_params params(0.5, 0.1, 1.0, interpolling_distribution::exponential(1.0));
  const energy_params ep(0.2, 1.0);
  const drift_bound b = drift_constants(params.lambda, 1.0, 2.0, ep);
  for (int trial = 0; trial < 60; ++trial) {
    configuration z = random_config(rng, 10, 10);
    const double drift = energy_drift(z, params, ep);
    CHECK(drift <= -b.c1 * static_cast<double>(z.total_count()) + b.c2 + 1e-10);
  }
  configuration cluster(1.0);
  cluster.insert(0.25, 1000);
  CHECK(energy_drift(cluster, params, ep) <= -b.c1 * 1000 + b.c2 + 1e-10);
}

TEST_CASE("seminorm drift threshold: frozen example and preconditions") {
  const system_params params(0.5, 0.1, 1.0, interpolling_distribution::exponential(1.0));
  const energy_params ep(0.2, 1.0);
  const drift_margin m = seminorm_drift_margin(params, ep);
  CHECK(m.threshold == 14);  // ceil(2 * 0.28 / 0.04)
  CHECK(m.alpha == doctest::Approx(0.01));
  CHECK_THROWS_AS(seminorm_drift_margin(system_params(0.5, 0.1, 2.0, params.dist), energy_params(0.2, 2.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(seminorm_drift_margin(system_params(1.5, 0.1, 1.0, params.dist), ep), std::invalid_argument);
}

TEST_CASE("state and kernel circumference mismatches are rejected") {
  const system_params params(0.5, 0.1, 1.0, interpolling_distribution::exponential(1.0));
  const configuration wrong(2.0);
  CHECK_THROWS_AS(population_drift(wrong, params), std::invalid_argument);
  CHECK_THROWS_AS(energy_drift(configuration(1.0), params, energy_params(0.2, 2.0)), std::invalid_argument);
}
