#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "circlepoll/corpus.hpp"
#include "circlepoll/parallel.hpp"
#include "doctest.h"

using namespace circlepoll;

TEST_CASE("random instance generators respect their bounds") {
  std::mt19937_64 rng = par::substream_rng(1, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const configuration z = random_configuration(rng, 2.0, 6, 4);
    CHECK(z.distinct_atoms() <= 6);
    for (const auto& at : z.atoms()) {
      CHECK(at.location >= 0.0);
      CHECK(at.location < 2.0);
      CHECK(at.count >= 1);
      CHECK(at.count <= 4);
    }
    const signed_configuration s = random_signed_configuration(rng, 2.0, 6, 3);
    for (const auto& at : s.atoms()) {
      CHECK(at.weight != 0);
      CHECK(std::llabs(at.weight) <= 3);
    }
  }
  CHECK_THROWS_AS(random_configuration(rng, 1.0, -1, 2), std::invalid_argument);
  CHECK_THROWS_AS(random_signed_configuration(rng, 1.0, 3, 0), std::invalid_argument);
}

TEST_CASE("property corpus passes on a healthy build") {
  check_options opts;
  opts.seed = 20260814;
  opts.trials = 2000;
  const std::vector<check_result> results = run_lemma_checks(opts);
  CHECK(results.size() >= 9);
  for (const check_result& res : results) {
    INFO(res.name);
    CHECK(res.passed());
    CHECK(res.trials == 2000);
    CHECK(res.worst >= 0.0);
    CHECK(res.example.empty());
  }
}

TEST_CASE("property corpus is thread-count independent") {
  check_options serial;
  serial.trials = 600;
  check_options threaded = serial;
  threaded.threads = 4;
  const auto a = run_lemma_checks(serial);
  const auto b = run_lemma_checks(threaded);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].failures == b[i].failures);
    CHECK(a[i].worst == b[i].worst);
  }
}

TEST_CASE("a sabotaged kernel is caught by the positivity check") {
  check_options opts;
  opts.trials = 2000;
  opts.corrupt_kernel = true;
  const std::vector<check_result> results = run_lemma_checks(opts);
  bool found = false;
  for (const check_result& res : results) {
    if (res.name == "kernel-positive-semidefinite") {
      found = true;
      CHECK(res.failures > 0);
      CHECK(res.worst < 0.0);
      CHECK_FALSE(res.example.empty());
    }
  }
  CHECK(found);
}

TEST_CASE("non-unit circumference corpus also passes") {
  check_options opts;
  opts.trials = 800;
  opts.circumference = 2.7;
  for (const check_result& res : run_lemma_checks(opts)) {
    INFO(res.name);
    CHECK(res.passed());
  }
  opts.circumference = 0.0;
  CHECK_THROWS_AS(run_lemma_checks(opts), std::invalid_argument);
}

TEST_CASE("drift certificate holds at the reference point") {
  const system_params params(0.5, 0.1, 1.0, interpolling_distribution::exponential(1.0));
  const energy_params ep(0.2, 1.0);
  const drift_certificate cert = run_drift_certificate(params, ep, 400, 20260814, 1);
  CHECK(cert.bound.c1 == doctest::Approx(0.04));
  CHECK(cert.bound.c2 == doctest::Approx(0.28));
  CHECK(cert.trials == 400);
  CHECK(cert.violations == 0);
  CHECK(cert.min_margin >= 0.0);
  CHECK(cert.worst_example.empty());

  const drift_certificate threaded = run_drift_certificate(params, ep, 400, 20260814, 4);
  CHECK(threaded.min_margin == cert.min_margin);

  CHECK_THROWS_AS(run_drift_certificate(params, ep, 0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_drift_certificate(params, energy_params(0.3, 1.0), 10, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_drift_certificate(params, energy_params(0.2, 2.0), 10, 1, 1), std::invalid_argument);
}

TEST_CASE("cluster population drift: exact value dominates the closed bound") {
  const system_params params(0.95, 0.05, 1.0, interpolling_distribution::deterministic(1.0));
  const cluster_drift cd = population_drift_at_cluster(params, 100);
  CHECK(cd.lower_bound == doctest::Approx(-0.05 + std::exp(-0.95) * 0.9).epsilon(1e-12));
  CHECK(cd.lower_bound == doctest::Approx(0.2980669).epsilon(1e-6));
  CHECK(cd.drift >= cd.lower_bound);
  CHECK(cd.drift == doctest::Approx(0.7684356).epsilon(1e-6));
  CHECK_THROWS_AS(population_drift_at_cluster(params, 0), std::invalid_argument);
}
