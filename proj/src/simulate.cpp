#include "circlepoll/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "circlepoll/circle.hpp"
#include "circlepoll/parallel.hpp"

namespace circlepoll {

namespace {

constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal quantile

void check_initial(const configuration& initial, const system_params& params) {
  if (initial.circumference() != params.circumference)
    throw std::invalid_argument("initial state circumference does not match the system parameters");
}

void bump_histogram(std::vector<long long>& hist, long long level) {
  if (level >= static_cast<long long>(hist.size())) hist.resize(static_cast<std::size_t>(level) + 1, 0);
  ++hist[static_cast<std::size_t>(level)];
}

}  // namespace

path_record run_path(const system_params& params, long steps, std::uint64_t seed, const configuration& initial,
                     const std::vector<long>& snapshot_steps) {
  if (steps < 0) throw std::invalid_argument("run_path: steps must be >= 0");
  check_initial(initial, params);
  std::mt19937_64 rng = par::substream_rng(seed, 0);
  std::mt19937_64 tie_rng = par::substream_rng(seed, 1);
  std::vector<long> snaps = snapshot_steps;
  std::sort(snaps.begin(), snaps.end());
  auto want_snapshot = [&](long step) { return std::binary_search(snaps.begin(), snaps.end(), step); };

  path_record rec;
  rec.seed = seed;
  rec.steps = steps;
  rec.population.reserve(static_cast<std::size_t>(steps) + 1);
  rec.arrivals.reserve(static_cast<std::size_t>(steps));
  rec.served.reserve(static_cast<std::size_t>(steps));

  configuration state = initial;
  rec.population.push_back(state.total_count());
  if (want_snapshot(0)) rec.snapshots.emplace(0, state);
  std::uniform_real_distribution<double> uloc(0.0, params.circumference);
  for (long step = 1; step <= steps; ++step) {
    const arrival_batch batch = sample_interarrival_batch(params, rng);
    for (const double x : batch.locations) state.insert(x);
    const double scan = wrap_position(uloc(rng), params.circumference);
    const bool hit = poll_in_place(state, scan, params, tie_rng);
    rec.arrivals.push_back(static_cast<long>(batch.locations.size()));
    rec.served.push_back(hit ? 1 : 0);
    rec.population.push_back(state.total_count());
    if (want_snapshot(step)) rec.snapshots.emplace(step, state);
  }
  return rec;
}

stationary_estimate estimate_stationary(const system_params& params, long min_cycles, long max_steps,
                                        std::uint64_t seed) {
  if (min_cycles < 1) throw std::invalid_argument("estimate_stationary: min_cycles must be >= 1");
  if (max_steps < 1) throw std::invalid_argument("estimate_stationary: max_steps must be >= 1");
  std::mt19937_64 rng = par::substream_rng(seed, 0);
  std::mt19937_64 tie_rng = par::substream_rng(seed, 1);
  std::uniform_real_distribution<double> uloc(0.0, params.circumference);

  configuration state(params.circumference);
  std::vector<double> cycle_sums, cycle_lengths;
  std::vector<long long> hist, cur_hist;
  double cur_sum = 0;
  long cur_len = 0;
  long steps = 0;
  while (steps < max_steps && static_cast<long>(cycle_sums.size()) < min_cycles) {
    const arrival_batch batch = sample_interarrival_batch(params, rng);
    for (const double x : batch.locations) state.insert(x);
    poll_in_place(state, wrap_position(uloc(rng), params.circumference), params, tie_rng);
    ++steps;
    const long long n = state.total_count();
    cur_sum += static_cast<double>(n);
    ++cur_len;
    bump_histogram(cur_hist, n);
    if (state.empty()) {
      cycle_sums.push_back(cur_sum);
      cycle_lengths.push_back(static_cast<double>(cur_len));
      if (cur_hist.size() > hist.size()) hist.resize(cur_hist.size(), 0);
      for (std::size_t k = 0; k < cur_hist.size(); ++k) hist[k] += cur_hist[k];
      std::fill(cur_hist.begin(), cur_hist.end(), 0);
      cur_sum = 0;
      cur_len = 0;
    }
  }

  stationary_estimate est;
  est.steps_used = steps;
  est.cycles = static_cast<long>(cycle_sums.size());
  est.complete = est.cycles >= min_cycles;
  est.tail_histogram = hist;
  if (est.cycles >= 1) {
    double total_sum = 0, total_len = 0;
    for (long i = 0; i < est.cycles; ++i) {
      total_sum += cycle_sums[static_cast<std::size_t>(i)];
      total_len += cycle_lengths[static_cast<std::size_t>(i)];
    }
    est.mean_population = total_sum / total_len;
    est.cycle_length_mean = total_len / static_cast<double>(est.cycles);
    if (est.cycles >= 30) {
      double s2 = 0;
      for (long i = 0; i < est.cycles; ++i) {
        const double d = cycle_sums[static_cast<std::size_t>(i)] -
                         est.mean_population * cycle_lengths[static_cast<std::size_t>(i)];
        s2 += d * d;
      }
      s2 /= static_cast<double>(est.cycles - 1);
      est.half_width_95 = kZ95 * std::sqrt(s2 / static_cast<double>(est.cycles)) / est.cycle_length_mean;
    }
  }
  return est;
}

stationary_estimate batch_means_estimate(const system_params& params, long steps, std::uint64_t seed) {
  if (steps < 300) throw std::invalid_argument("batch_means_estimate: needs at least 300 steps");
  const path_record rec = run_path(params, steps, seed, configuration(params.circumference));
  const long burn = steps / 10;
  const int batches = 30;
  const long batch_len = (steps - burn) / batches;

  stationary_estimate est;
  est.approximate = true;
  est.complete = true;
  est.steps_used = steps;
  std::vector<double> means(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    double s = 0;
    for (long j = 0; j < batch_len; ++j) {
      const long long n = rec.population[static_cast<std::size_t>(burn + static_cast<long>(b) * batch_len + j + 1)];
      s += static_cast<double>(n);
      bump_histogram(est.tail_histogram, n);
    }
    means[static_cast<std::size_t>(b)] = s / static_cast<double>(batch_len);
  }
  double mean = 0;
  for (const double m : means) mean += m;
  mean /= batches;
  double s2 = 0;
  for (const double m : means) s2 += (m - mean) * (m - mean);
  s2 /= batches - 1;
  est.mean_population = mean;
  est.half_width_95 = kZ95 * std::sqrt(s2 / batches);
  return est;
}

std::vector<long long> autonomous_queue_path(double lambda, const interpolling_distribution& dist, long steps,
                                             std::uint64_t seed) {
  if (!(lambda > 0)) throw std::invalid_argument("autonomous_queue_path: lambda must be positive");
  if (steps < 0) throw std::invalid_argument("autonomous_queue_path: steps must be >= 0");
  std::mt19937_64 rng = par::substream_rng(seed, 0);
  std::vector<long long> path;
  path.reserve(static_cast<std::size_t>(steps) + 1);
  long long n = 0;
  path.push_back(n);
  for (long k = 0; k < steps; ++k) {
    const double s = dist.sample(rng);
    const long arrivals = s > 0 ? std::poisson_distribution<long>(lambda * s)(rng) : 0;
    n = std::max<long long>(n + arrivals - 1, 0);
    path.push_back(n);
  }
  return path;
}

stationary_estimate autonomous_queue_oracle(double lambda, const interpolling_distribution& dist, long steps,
                                            std::uint64_t seed) {
  const std::vector<long long> path = autonomous_queue_path(lambda, dist, steps, seed);
  stationary_estimate est;
  est.steps_used = steps;
  std::vector<double> cycle_sums, cycle_lengths;
  std::vector<long long> cur_hist;
  double cur_sum = 0;
  long cur_len = 0;
  for (long k = 1; k <= steps; ++k) {
    const long long n = path[static_cast<std::size_t>(k)];
    cur_sum += static_cast<double>(n);
    ++cur_len;
    bump_histogram(cur_hist, n);
    if (n == 0) {
      cycle_sums.push_back(cur_sum);
      cycle_lengths.push_back(static_cast<double>(cur_len));
      if (cur_hist.size() > est.tail_histogram.size()) est.tail_histogram.resize(cur_hist.size(), 0);
      for (std::size_t j = 0; j < cur_hist.size(); ++j) est.tail_histogram[j] += cur_hist[j];
      std::fill(cur_hist.begin(), cur_hist.end(), 0);
      cur_sum = 0;
      cur_len = 0;
    }
  }
  est.cycles = static_cast<long>(cycle_sums.size());
  est.complete = est.cycles >= 30;
  if (est.cycles >= 1) {
    double total_sum = 0, total_len = 0;
    for (double v : cycle_sums) total_sum += v;
    for (double v : cycle_lengths) total_len += v;
    est.mean_population = total_sum / total_len;
    est.cycle_length_mean = total_len / static_cast<double>(est.cycles);
    if (est.cycles >= 30) {
      double s2 = 0;
      for (long i = 0; i < est.cycles; ++i) {
        const double d = cycle_sums[static_cast<std::size_t>(i)] -
                         est.mean_population * cycle_lengths[static_cast<std::size_t>(i)];
        s2 += d * d;
      }
      s2 /= static_cast<double>(est.cycles - 1);
      est.half_width_95 = kZ95 * std::sqrt(s2 / static_cast<double>(est.cycles)) / est.cycle_length_mean;
    }
  }
  return est;
}

mc_estimate drift_monte_carlo(const configuration& state, const system_params& params, path_functional f, long reps,
                              std::uint64_t seed, const energy_params* ep, double beta, int threads) {
  if (reps < 2) throw std::invalid_argument("drift_monte_carlo: needs at least 2 replications");
  check_initial(state, params);
  const bool needs_kernel =
      f == path_functional::energy || f == path_functional::seminorm || f == path_functional::exp_seminorm;
  if (needs_kernel && ep == nullptr)
    throw std::invalid_argument("drift_monte_carlo: this functional needs kernel parameters");

  auto value = [&](const configuration& c) -> double {
    switch (f) {
      case path_functional::population:
        return static_cast<double>(c.total_count());
      case path_functional::energy:
        return energy_value(c, *ep);
      case path_functional::seminorm:
        return seminorm(c, *ep);
      case path_functional::exp_seminorm:
        return std::exp(beta * seminorm(c, *ep));
    }
    return 0;
  };
  const double base = value(state);

  const long block_size = 1024;
  const std::size_t blocks = static_cast<std::size_t>((reps + block_size - 1) / block_size);
  struct moments {
    double sum = 0;
    double sumsq = 0;
  };
  const moments total = par::block_reduce(
      blocks, threads, moments{},
      [&](std::size_t b) {
        std::mt19937_64 rng = par::substream_rng(seed, b);
        std::uniform_real_distribution<double> uloc(0.0, params.circumference);
        const long lo = static_cast<long>(b) * block_size;
        const long hi = std::min(reps, lo + block_size);
        moments m;
        for (long i = lo; i < hi; ++i) {
          configuration next = state;
          const arrival_batch batch = sample_interarrival_batch(params, rng);
          for (const double x : batch.locations) next.insert(x);
          poll_in_place(next, wrap_position(uloc(rng), params.circumference), params, rng);
          const double d = value(next) - base;
          m.sum += d;
          m.sumsq += d * d;
        }
        return m;
      },
      [](moments acc, moments part) {
        acc.sum += part.sum;
        acc.sumsq += part.sumsq;
        return acc;
      });

  mc_estimate est;
  est.reps = reps;
  est.estimate = total.sum / static_cast<double>(reps);
  const double var =
      std::max(0.0, (total.sumsq - static_cast<double>(reps) * est.estimate * est.estimate) /
                        static_cast<double>(reps - 1));
  est.std_error = std::sqrt(var / static_cast<double>(reps));
  return est;
}

stationary_sample collect_stationary_sample(const system_params& params, long steps, std::uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("collect_stationary_sample: steps must be >= 1");
  std::mt19937_64 rng = par::substream_rng(seed, 0);
  std::mt19937_64 tie_rng = par::substream_rng(seed, 1);
  std::uniform_real_distribution<double> uloc(0.0, params.circumference);
  configuration state(params.circumference);
  stationary_sample sample;
  sample.entries.reserve(static_cast<std::size_t>(steps));
  bool at_regeneration = true;  // the chain starts empty, which is a regeneration point
  for (long k = 0; k < steps; ++k) {
    if (at_regeneration) sample.cycle_starts.push_back(sample.entries.size());
    const arrival_batch batch = sample_interarrival_batch(params, rng);
    for (const double x : batch.locations) state.insert(x);
    sample.entries.emplace_back(state.total_count(), union_balls_measure(state, params.scan_radius));
    poll_in_place(state, wrap_position(uloc(rng), params.circumference), params, tie_rng);
    at_regeneration = state.empty();
  }
  return sample;
}

residual_estimate laplace_residual(const system_params& params, double theta, const stationary_sample& sample) {
  if (!(theta > 0)) throw std::invalid_argument("laplace_residual: theta must be positive");
  if (sample.entries.empty()) throw std::invalid_argument("laplace_residual: empty sample");
  const double ghat = params.dist.laplace(params.lambda * (1 - std::exp(-theta)));
  const double lift = std::exp(theta) - 1;
  auto entry_residual = [&](const std::pair<long long, double>& e) {
    const double w = std::exp(-theta * static_cast<double>(e.first));
    return w - ghat * w * (1 + lift * e.second);
  };

  residual_estimate res;
  const auto& starts = sample.cycle_starts;
  if (starts.size() < 2) {
    double sum = 0;
    for (const auto& e : sample.entries) sum += entry_residual(e);
    res.residual = sum / static_cast<double>(sample.entries.size());
    res.std_error = std::numeric_limits<double>::infinity();
    res.cycles = 0;
    return res;
  }
  std::vector<double> cycle_res, cycle_len;
  double total_res = 0, total_len = 0;
  for (std::size_t i = 0; i + 1 < starts.size(); ++i) {
    double d = 0;
    for (std::size_t j = starts[i]; j < starts[i + 1]; ++j) d += entry_residual(sample.entries[j]);
    cycle_res.push_back(d);
    cycle_len.push_back(static_cast<double>(starts[i + 1] - starts[i]));
    total_res += d;
    total_len += cycle_len.back();
  }
  res.cycles = static_cast<long>(cycle_res.size());
  res.residual = total_res / total_len;
  if (res.cycles >= 2) {
    double s2 = 0;
    for (std::size_t i = 0; i < cycle_res.size(); ++i) {
      const double d = cycle_res[i] - res.residual * cycle_len[i];
      s2 += d * d;
    }
    s2 /= static_cast<double>(res.cycles - 1);
    const double mean_len = total_len / static_cast<double>(res.cycles);
    res.std_error = std::sqrt(s2 / static_cast<double>(res.cycles)) / mean_len;
  } else {
    res.std_error = std::numeric_limits<double>::infinity();
  }
  return res;
}

tail_fit tail_geometric_fit(const stationary_estimate& estimate) {
  const auto& hist = estimate.tail_histogram;
  long long total = 0;
  for (const long long c : hist) total += c;
  if (total <= 0) throw std::invalid_argument("tail_geometric_fit: empty histogram");

  // A level enters the fit while at least 10 samples sit at or above it, which
  // keeps the noisy extreme tail out of the regression.
  std::vector<double> ks, ys;
  long long suffix = total;
  for (std::size_t k = 0; k < hist.size(); ++k) {
    if (suffix < 10) break;
    ks.push_back(static_cast<double>(k));
    ys.push_back(std::log(static_cast<double>(suffix) / static_cast<double>(total)));
    suffix -= hist[k];
  }
  if (ks.size() < 5) throw std::invalid_argument("tail_geometric_fit: needs at least 5 populated levels");

  const double n = static_cast<double>(ks.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    sx += ks[i];
    sy += ys[i];
    sxx += ks[i] * ks[i];
    sxy += ks[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  tail_fit fit;
  fit.levels = static_cast<long>(ks.size());
  fit.slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double e = ys[i] - (intercept + fit.slope * ks[i]);
    ss_res += e * e;
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  fit.r_squared = ss_tot > 0 ? 1 - ss_res / ss_tot : 1.0;
  return fit;
}

std::pair<path_record, path_record> run_coupled_paths(const system_params& params, long steps, std::uint64_t seed,
                                                      const configuration& initial) {
  if (steps < 0) throw std::invalid_argument("run_coupled_paths: steps must be >= 0");
  check_initial(initial, params);
  const system_params full(params.lambda, params.circumference / 2, params.circumference, params.dist);
  std::mt19937_64 rng = par::substream_rng(seed, 0);
  std::mt19937_64 tie_narrow = par::substream_rng(seed, 1);
  std::mt19937_64 tie_full = par::substream_rng(seed, 2);
  std::uniform_real_distribution<double> uloc(0.0, params.circumference);

  path_record narrow, wide;
  narrow.seed = wide.seed = seed;
  narrow.steps = wide.steps = steps;
  configuration state_narrow = initial;
  configuration state_full = initial;
  narrow.population.push_back(state_narrow.total_count());
  wide.population.push_back(state_full.total_count());
  for (long step = 1; step <= steps; ++step) {
    const arrival_batch batch = sample_interarrival_batch(params, rng);
    for (const double x : batch.locations) {
      state_narrow.insert(x);
      state_full.insert(x);
    }
    const double scan = wrap_position(uloc(rng), params.circumference);
    const bool hit_narrow = poll_in_place(state_narrow, scan, params, tie_narrow);
    const bool hit_full = poll_in_place(state_full, scan, full, tie_full);
    narrow.arrivals.push_back(static_cast<long>(batch.locations.size()));
    wide.arrivals.push_back(static_cast<long>(batch.locations.size()));
    narrow.served.push_back(hit_narrow ? 1 : 0);
    wide.served.push_back(hit_full ? 1 : 0);
    narrow.population.push_back(state_narrow.total_count());
    wide.population.push_back(state_full.total_count());
  }
  return {narrow, wide};
}

void write_path_csv(std::ostream& out, const path_record& record) {
  out << "step,population\n";
  for (std::size_t i = 0; i < record.population.size(); ++i) out << i << ',' << record.population[i] << '\n';
}

void write_sweep_csv(std::ostream& out, const std::string& param_name, const std::vector<sweep_row>& rows) {
  const auto prec = out.precision(12);
  out << param_name << ",mean,ci_half_width,approximation\n";
  for (const auto& row : rows)
    out << row.param << ',' << row.mean << ',' << row.half_width << ',' << row.approximation << '\n';
  out.precision(prec);
}

void write_tail_csv(std::ostream& out, const stationary_estimate& estimate) {
  const auto& hist = estimate.tail_histogram;
  long long total = 0;
  for (const long long c : hist) total += c;
  const auto prec = out.precision(12);
  out << "k,log_survival\n";
  long long suffix = total;
  for (std::size_t k = 0; k < hist.size() && suffix > 0; ++k) {
    out << k << ',' << std::log(static_cast<double>(suffix) / static_cast<double>(total)) << '\n';
    suffix -= hist[k];
  }
  out.precision(prec);
}

double light_traffic_mean(const system_params& params) {
  return params.load() / ball_measure(params.scan_radius, params.circumference);
}

}  // namespace circlepoll
