#include "circlepoll/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

#include "circlepoll/circle.hpp"
#include "circlepoll/parallel.hpp"

namespace circlepoll {

configuration random_configuration(std::mt19937_64& rng, double circumference, int max_atoms, int max_count) {
  if (max_atoms < 0) throw std::invalid_argument("random_configuration: max_atoms must be >= 0");
  if (max_count < 1) throw std::invalid_argument("random_configuration: max_count must be >= 1");
  std::uniform_int_distribution<int> natoms(0, max_atoms);
  std::uniform_real_distribution<double> loc(0.0, circumference);
  std::uniform_int_distribution<int> count(1, max_count);
  configuration state(circumference);
  const int n = natoms(rng);
  for (int i = 0; i < n; ++i) state.insert(wrap_position(loc(rng), circumference), count(rng));
  return state;
}

signed_configuration random_signed_configuration(std::mt19937_64& rng, double circumference, int max_atoms,
                                                 int max_weight) {
  if (max_atoms < 0) throw std::invalid_argument("random_signed_configuration: max_atoms must be >= 0");
  if (max_weight < 1) throw std::invalid_argument("random_signed_configuration: max_weight must be >= 1");
  std::uniform_int_distribution<int> natoms(0, max_atoms);
  std::uniform_real_distribution<double> loc(0.0, circumference);
  std::uniform_int_distribution<int> weight(-max_weight, max_weight);
  std::vector<signed_configuration::atom> atoms;
  const int n = natoms(rng);
  atoms.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) atoms.push_back({wrap_position(loc(rng), circumference), weight(rng)});
  return signed_configuration::from_atoms(circumference, std::move(atoms));
}

namespace {

std::string describe(const configuration& state) {
  char head[64];
  std::snprintf(head, sizeof head, "count=%lld\n", state.total_count());
  return head + to_text(state);
}

std::string describe(const signed_configuration& state) {
  std::string text;
  char line[64];
  for (const auto& at : state.atoms()) {
    std::snprintf(line, sizeof line, "%.17g:%+lld\n", at.location, at.weight);
    text += line;
  }
  return text;
}

// Runs one named property over opts.trials random instances.  trial(rng,
// example) returns a signed margin (negative = violated) and may fill
// `example` with a witness; blocks use decorrelated substreams so the result
// does not depend on the thread count.
template <class TrialFn>
check_result run_check(const std::string& name, const check_options& opts, std::uint64_t salt, const TrialFn& trial) {
  struct partial {
    std::size_t fails = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::string example;
  };
  const std::size_t block_size = 512;
  const std::size_t blocks = (opts.trials + block_size - 1) / block_size;
  const partial total = par::block_reduce(
      blocks, opts.threads, partial{},
      [&](std::size_t b) {
        std::mt19937_64 rng = par::substream_rng(opts.seed, salt * 0x100000000ULL + b);
        const std::size_t lo = b * block_size;
        const std::size_t hi = std::min(opts.trials, lo + block_size);
        partial p;
        for (std::size_t i = lo; i < hi; ++i) {
          std::string example;
          const double margin = trial(rng, example);
          if (margin < 0) ++p.fails;
          if (margin < p.worst) {
            p.worst = margin;
            p.example = std::move(example);
          }
        }
        return p;
      },
      [](partial acc, partial part) {
        acc.fails += part.fails;
        if (part.worst < acc.worst) {
          acc.worst = part.worst;
          acc.example = std::move(part.example);
        }
        return acc;
      });
  check_result res;
  res.name = name;
  res.trials = opts.trials;
  res.failures = total.fails;
  res.worst = opts.trials == 0 ? 0 : total.worst;
  if (total.fails > 0) res.example = total.example;
  return res;
}

}  // namespace

std::vector<check_result> run_lemma_checks(const check_options& opts) {
  if (!(opts.circumference > 0)) throw std::invalid_argument("run_lemma_checks: circumference must be positive");
  const double ell = opts.circumference;
  std::vector<check_result> results;
  const auto upoint = [ell](std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.0, ell)(rng);
  };

  results.push_back(run_check("arc-distance-metric", opts, 1, [&](std::mt19937_64& rng, std::string& example) {
    std::uniform_real_distribution<double> u(0.0, ell);
    const double x = u(rng), y = u(rng), z = u(rng);
    const double tol = 1e-12 * ell;
    const double sym = tol - std::abs(arc_distance(x, y, ell) - arc_distance(y, x, ell));
    const double triangle = arc_distance(x, y, ell) + arc_distance(y, z, ell) - arc_distance(x, z, ell) + tol;
    const double range = std::min(arc_distance(x, y, ell) + tol, ell / 2 - arc_distance(x, y, ell) + tol);
    const double margin = std::min({sym, triangle, range});
    if (margin < 0) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "x=%.17g y=%.17g z=%.17g", x, y, z);
      example = buf;
    }
    return margin;
  }));

  results.push_back(run_check("voronoi-tiling", opts, 2, [&](std::mt19937_64& rng, std::string& example) {
    configuration state = random_configuration(rng, ell, 24, 5);
    if (state.empty()) state.insert(upoint(rng));
    const std::vector<arc> cells = voronoi_cells(state);
    double total = 0, shortest = ell;
    for (const arc& c : cells) {
      total += c.length;
      shortest = std::min(shortest, c.length);
    }
    const double margin = std::min(1e-9 * ell - std::abs(total - ell), shortest);
    if (margin < 0) example = describe(state);
    return margin;
  }));

  results.push_back(run_check("cell-ball-partition", opts, 3, [&](std::mt19937_64& rng, std::string& example) {
    configuration state = random_configuration(rng, ell, 24, 5);
    if (state.empty()) state.insert(upoint(rng));
    std::uniform_real_distribution<double> ur(0.01 * ell, 0.6 * ell);
    const double radius = ur(rng);
    double sum = 0;
    for (std::size_t i = 0; i < state.distinct_atoms(); ++i) sum += cell_ball_measure_by_index(i, state, radius);
    const double covered = union_balls_measure(state, radius);
    const double margin = std::min(1e-9 - std::abs(sum - covered), 1 + 1e-12 - covered);
    if (margin < 0) example = describe(state);
    return margin;
  }));

  results.push_back(run_check("kernel-positive-semidefinite", opts, 4, [&](std::mt19937_64& rng,
                                                                           std::string& example) {
    const signed_configuration state = random_signed_configuration(rng, ell, 16, 4);
    std::uniform_real_distribution<double> uw(0.02 * ell, 0.5 * ell);
    const double width = uw(rng);
    double quad = 0;
    for (const auto& p : state.atoms())
      for (const auto& q : state.atoms()) {
        const double k = width - arc_distance(p.location, q.location, ell);
        const double kernel = opts.corrupt_kernel ? k : std::max(k, 0.0);
        quad += kernel * static_cast<double>(p.weight) * static_cast<double>(q.weight);
      }
    const double margin = quad + 1e-12;
    if (margin < 0) example = describe(state);
    return margin;
  }));

  results.push_back(run_check("energy-two-routes", opts, 5, [&](std::mt19937_64& rng, std::string& example) {
    const signed_configuration state = random_signed_configuration(rng, ell, 12, 4);
    std::uniform_real_distribution<double> uw(0.02 * ell, 0.5 * ell);
    const energy_params p(uw(rng), ell);
    const double direct = inner_product(state, state, p);
    const double grid = ball_count_representation(state, p, 64);
    const double margin = 1e-9 * (1 + std::abs(direct)) - std::abs(direct - grid);
    if (margin < 0) example = describe(state);
    return margin;
  }));

  results.push_back(run_check("seminorm-triangle", opts, 6, [&](std::mt19937_64& rng, std::string& example) {
    const signed_configuration a = random_signed_configuration(rng, ell, 10, 3);
    const signed_configuration b = random_signed_configuration(rng, ell, 10, 3);
    std::uniform_real_distribution<double> uw(0.02 * ell, 0.5 * ell);
    const energy_params p(uw(rng), ell);
    const double margin = seminorm(a, p) + seminorm(b, p) - seminorm(signed_sum(a, b), p) + 1e-9;
    if (margin < 0) example = describe(a) + "--\n" + describe(b);
    return margin;
  }));

  results.push_back(run_check("norm-domination", opts, 7, [&](std::mt19937_64& rng, std::string& example) {
    configuration state = random_configuration(rng, ell, 12, 6);
    if (state.empty()) state.insert(upoint(rng));
    std::uniform_real_distribution<double> uw(0.02 * ell, 0.5 * ell);
    const energy_params p(uw(rng), ell);
    const double tv = static_cast<double>(state.total_count());
    const double value = seminorm(state, p);
    const double upper = std::sqrt(p.width) * tv - value + 1e-9;
    const double lower = value - std::sqrt(p.width / 2) * tv / (2 * ell / p.width + 1) + 1e-9;
    const double margin = std::min(upper, lower);
    if (margin < 0) example = describe(state);
    return margin;
  }));

  results.push_back(run_check("interpolation-exact-at-kinks", opts, 8, [&](std::mt19937_64& rng,
                                                                           std::string& example) {
    std::uniform_real_distribution<double> uw(0.0, 0.5 * ell);
    const double width = 0.5 * ell - uw(rng) * 0.98;  // keeps width in (0.01*ell, 0.5*ell]
    const double x = upoint(rng);
    configuration state = random_configuration(rng, ell, 20, 3);
    state.insert(x);
    state.insert(wrap_position(x + width, ell));
    state.insert(wrap_position(x - width, ell));
    const energy_params p(width, ell);
    const double margin = 1e-10 - std::abs(interpolation_sum(x, state, p) - width * width / ell);
    if (margin < 0) example = describe(state);
    return margin;
  }));

  results.push_back(run_check("interpolation-floor", opts, 9, [&](std::mt19937_64& rng, std::string& example) {
    configuration state = random_configuration(rng, ell, 20, 3);
    if (state.empty()) state.insert(upoint(rng));
    std::uniform_real_distribution<double> ur(0.01 * ell, 0.6 * ell);
    const double radius = ur(rng);
    const double width = std::min(ell / 2, 2 * radius);
    const energy_params p(width, ell);
    std::uniform_int_distribution<std::size_t> pick(0, state.distinct_atoms() - 1);
    const double x = state.atoms()[pick(rng)].location;
    const double margin = interpolation_sum(x, state, p, radius) - width * width / ell + 1e-10;
    if (margin < 0) example = describe(state);
    return margin;
  }));

  results.push_back(run_check("insert-energy-identity", opts, 10, [&](std::mt19937_64& rng, std::string& example) {
    const configuration state = random_configuration(rng, ell, 12, 5);
    std::uniform_real_distribution<double> uw(0.02 * ell, 0.5 * ell);
    const energy_params p(uw(rng), ell);
    const double x = upoint(rng);
    const signed_configuration probe = signed_configuration::from_atoms(ell, {{x, 1}});
    const double before = energy_value(state, p);
    const double cross = inner_product(to_signed(state), probe, p);
    const double after = energy_value(add_atom(state, x), p);
    const double margin = 1e-9 * (1 + std::abs(after)) - std::abs(after - (before + 2 * cross + p.width));
    if (margin < 0) example = describe(state);
    return margin;
  }));

  return results;
}

namespace {

// Deterministic drift corpus entry: clusters, two-cluster states, regular
// grids and random configurations, cycled by index.
configuration certificate_entry(std::size_t index, double ell, std::uint64_t seed) {
  std::mt19937_64 rng = par::substream_rng(seed, 0xdc0000000000ULL + index);
  std::uniform_real_distribution<double> loc(0.0, ell);
  if (index == 0) return configuration(ell);
  switch (index % 4) {
    case 0: {  // single cluster, sizes swept on a log-ish ladder
      static const long long sizes[] = {1, 2, 3, 5, 10, 30, 100, 300, 1000};
      configuration state(ell);
      state.insert(wrap_position(loc(rng), ell), sizes[index / 4 % 9]);
      return state;
    }
    case 1: {  // two clusters at a random separation
      configuration state(ell);
      std::uniform_int_distribution<long long> count(1, 200);
      state.insert(wrap_position(loc(rng), ell), count(rng));
      state.insert(wrap_position(loc(rng), ell), count(rng));
      return state;
    }
    case 2: {  // regular grid with random counts
      configuration state(ell);
      std::uniform_int_distribution<int> natoms(2, 24);
      std::uniform_int_distribution<long long> count(1, 40);
      const int n = natoms(rng);
      const double shift = loc(rng);
      for (int i = 0; i < n; ++i) state.insert(wrap_position(shift + ell * i / n, ell), count(rng));
      return state;
    }
    default:
      return random_configuration(rng, ell, 30, 20);
  }
}

}  // namespace

drift_certificate run_drift_certificate(const system_params& params, const energy_params& ep, std::size_t trials,
                                        std::uint64_t seed, int threads) {
  if (trials == 0) throw std::invalid_argument("run_drift_certificate: needs at least one trial");
  if (ep.circumference != params.circumference)
    throw std::invalid_argument("run_drift_certificate: kernel circumference mismatch");
  if (ep.width > 2 * params.scan_radius + 1e-15)
    throw std::invalid_argument("run_drift_certificate: kernel width must not exceed twice the scan radius");
  const drift_bound bound = drift_constants(params.lambda, params.dist.mean(), params.dist.second_moment(), ep);
  constexpr double kSlack = 1e-10;  // numerical slack on the certified line

  struct partial {
    std::size_t violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::string worst;
  };
  const partial total = par::block_reduce(
      trials, threads, partial{},
      [&](std::size_t i) {
        const configuration state = certificate_entry(i, params.circumference, seed);
        const double drift = energy_drift(state, params, ep);
        const double line = -bound.c1 * static_cast<double>(state.total_count()) + bound.c2;
        partial p;
        p.min_margin = line + kSlack - drift;
        if (p.min_margin < 0) {
          p.violations = 1;
          p.worst = describe(state);
        }
        return p;
      },
      [](partial acc, partial part) {
        acc.violations += part.violations;
        if (part.min_margin < acc.min_margin) {
          acc.min_margin = part.min_margin;
          if (!part.worst.empty()) acc.worst = std::move(part.worst);
        }
        return acc;
      });

  drift_certificate cert;
  cert.bound = bound;
  cert.trials = trials;
  cert.violations = total.violations;
  cert.min_margin = total.min_margin;
  cert.worst_example = total.worst;
  return cert;
}

cluster_drift population_drift_at_cluster(const system_params& params, long long n) {
  if (n < 1) throw std::invalid_argument("population_drift_at_cluster: n must be >= 1");
  configuration state(params.circumference);
  state.insert(0.0, n);
  cluster_drift out;
  out.drift = population_drift(state, params);
  const double ball = ball_measure(params.scan_radius, params.circumference);
  out.lower_bound = params.load() - 1 + params.dist.mixed_poisson_pmf(params.lambda, 0) * (1 - ball);
  return out;
}

}  // namespace circlepoll
