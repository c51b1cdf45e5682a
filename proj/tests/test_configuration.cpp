#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <stdexcept>

#include "circlepoll/configuration.hpp"
#include "doctest.h"

using namespace circlepoll;

TEST_CASE("configuration keeps atoms sorted and merged") {
  configuration z(1.0);
  CHECK(z.empty());
  CHECK(z.total_count() == 0);
  z.insert(0.5, 2);
  z.insert(0.1);
  z.insert(0.5, 3);
  REQUIRE(z.distinct_atoms() == 2);
  CHECK(z.atoms()[0].location == 0.1);
  CHECK(z.atoms()[0].count == 1);
  CHECK(z.atoms()[1].location == 0.5);
  CHECK(z.atoms()[1].count == 5);
  CHECK(z.total_count() == 6);

  CHECK_THROWS_AS(z.insert(1.0), std::invalid_argument);   // out of [0, L)
  CHECK_THROWS_AS(z.insert(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(z.insert(0.2, 0), std::invalid_argument);
  CHECK_THROWS_AS(z.insert(0.2, -3), std::invalid_argument);
  CHECK_THROWS_AS(configuration(0.0), std::invalid_argument);
}

TEST_CASE("find, remove_one and remove_at") {
  configuration z(2.0);
  z.insert(0.25, 2);
  z.insert(1.5);
  CHECK(z.find(0.25) == 0);
  CHECK(z.find(1.5) == 1);
  CHECK(z.find(0.3) == configuration::npos);

  z.remove_one(0);
  CHECK(z.atoms()[0].count == 1);
  z.remove_one(0);
  REQUIRE(z.distinct_atoms() == 1);
  CHECK(z.atoms()[0].location == 1.5);
  CHECK_THROWS_AS(z.remove_one(4), std::invalid_argument);
  CHECK_THROWS_AS(z.remove_at(0.25), std::invalid_argument);
  z.remove_at(1.5);
  CHECK(z.empty());
}

TEST_CASE("from_atoms sorts and merges duplicates") {
  const configuration z = configuration::from_atoms(1.0, {{0.7, 1}, {0.2, 2}, {0.7, 3}});
  REQUIRE(z.distinct_atoms() == 2);
  CHECK(z.atoms()[0].location == 0.2);
  CHECK(z.atoms()[1].count == 4);
  CHECK_THROWS_AS(configuration::from_atoms(1.0, {{0.2, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(configuration::from_atoms(1.0, {{1.2, 1}}), std::invalid_argument);
}

TEST_CASE("value-returning helpers leave the input untouched") {
  configuration z(1.0);
  z.insert(0.4);
  const configuration more = add_atom(z, 0.4);
  CHECK(z.total_count() == 1);
  CHECK(more.total_count() == 2);
  const configuration less = remove_atom(more, 0.4);
  CHECK(less == z);
  CHECK(total_variation(more) == 2);
}

TEST_CASE("signed measures drop zero weights and merge") {
  const signed_configuration s = signed_configuration::from_atoms(1.0, {{0.3, 2}, {0.3, -2}, {0.6, -1}});
  REQUIRE(s.atoms().size() == 1);
  CHECK(s.atoms()[0].location == 0.6);
  CHECK(s.atoms()[0].weight == -1);
  CHECK(total_variation(s) == 1);

  configuration a(1.0), b(1.0);
  a.insert(0.1, 3);
  a.insert(0.5);
  b.insert(0.1, 1);
  b.insert(0.9, 2);
  const signed_configuration d = difference(a, b);
  REQUIRE(d.atoms().size() == 3);
  CHECK(d.atoms()[0].weight == 2);   // 0.1
  CHECK(d.atoms()[1].weight == 1);   // 0.5
  CHECK(d.atoms()[2].weight == -2);  // 0.9
  CHECK(total_variation(d) == 5);
  CHECK(difference(a, a).empty());

  const signed_configuration sum = signed_sum(d, to_signed(b));
  CHECK(sum.atoms().size() == to_signed(a).atoms().size());
  CHECK(total_variation(sum) == 4);

  configuration other(2.0);
  CHECK_THROWS_AS(difference(a, other), std::invalid_argument);
}

TEST_CASE("text round trip is exact") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<long long> c(1, 1000);
  for (int trial = 0; trial < 200; ++trial) {
    configuration z(1.0);
    const int n = static_cast<int>(u(rng) * 10);
    for (int i = 0; i < n; ++i) z.insert(u(rng), c(rng));
    const configuration back = configuration_from_text(1.0, to_text(z));
    CHECK(back == z);
  }
  CHECK_THROWS_AS(configuration_from_text(1.0, "0.5\n"), std::invalid_argument);
}

TEST_CASE("equality is exact on locations, counts and circumference") {
  configuration a(1.0), b(1.0), c(2.0);
  a.insert(0.5);
  b.insert(0.5);
  c.insert(0.5);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  b.insert(0.5);
  CHECK_FALSE(a == b);
}
