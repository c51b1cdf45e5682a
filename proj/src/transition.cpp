#include "circlepoll/transition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "circlepoll/circle.hpp"

namespace circlepoll {

namespace {

void check_state(const configuration& state, const system_params& params) {
  if (state.circumference() != params.circumference)
    throw std::invalid_argument("state circumference does not match the system parameters");
}

void check_energy(const system_params& params, const energy_params& ep) {
  if (ep.circumference != params.circumference)
    throw std::invalid_argument("kernel circumference does not match the system parameters");
}

constexpr int kGlOrder = 24;

struct gl_rule {
  std::array<double, kGlOrder> node;
  std::array<double, kGlOrder> weight;
};

// Nodes and weights of the 24-point Gauss-Legendre rule on [-1, 1], found by
// Newton iteration on the Legendre recurrence.
const gl_rule& gl24() {
  static const gl_rule rule = [] {
    gl_rule r{};
    const double pi = std::acos(-1.0);
    for (int i = 0; i < kGlOrder / 2; ++i) {
      double x = std::cos(pi * (i + 0.75) / (kGlOrder + 0.5));
      double deriv = 1;
      for (int pass = 0; pass < 64; ++pass) {
        double p0 = 1, p1 = x;
        for (int k = 2; k <= kGlOrder; ++k) {
          const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        deriv = kGlOrder * (x * p1 - p0) / (x * x - 1);
        const double step = p1 / deriv;
        x -= step;
        if (std::abs(step) < 1e-15) break;
      }
      r.node[i] = -x;
      r.node[kGlOrder - 1 - i] = x;
      const double w = 2 / ((1 - x * x) * deriv * deriv);
      r.weight[i] = w;
      r.weight[kGlOrder - 1 - i] = w;
    }
    return r;
  }();
  return rule;
}

template <class Fn>
double gl_integrate(double lo, double hi, const Fn& fn) {
  if (!(hi > lo)) return 0;
  const auto& r = gl24();
  const double mid = (lo + hi) / 2;
  const double half = (hi - lo) / 2;
  double s = 0;
  for (int i = 0; i < kGlOrder; ++i) s += r.weight[i] * fn(mid + half * r.node[i]);
  return s * half;
}

template <class Fn>
double adaptive_gl(double lo, double hi, const Fn& fn, double floor_tol, int depth) {
  const double whole = gl_integrate(lo, hi, fn);
  const double mid = (lo + hi) / 2;
  const double split = gl_integrate(lo, mid, fn) + gl_integrate(mid, hi, fn);
  if (depth >= 14 || std::abs(whole - split) <= 1e-13 * std::abs(split) + floor_tol) return split;
  return adaptive_gl(lo, mid, fn, floor_tol / 2, depth + 1) + adaptive_gl(mid, hi, fn, floor_tol / 2, depth + 1);
}

// Integral of fn over [lo, hi], split at the interior cut points (panels must
// not straddle a kink of fn) and refined adaptively within each panel.
template <class Fn>
double panel_integrate(double lo, double hi, const std::vector<double>& cut_candidates, const Fn& fn) {
  if (!(hi > lo)) return 0;
  std::vector<double> cuts;
  cuts.reserve(cut_candidates.size() + 1);
  for (double c : cut_candidates)
    if (c > lo && c < hi) cuts.push_back(c);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double rough = 0;
  double prev = lo;
  for (double c : cuts) {
    if (c > prev) rough += std::abs(gl_integrate(prev, c, fn));
    prev = c;
  }
  const double floor_tol = 1e-15 * rough + 1e-300;
  double total = 0;
  prev = lo;
  for (double c : cuts) {
    if (c > prev) total += adaptive_gl(prev, c, fn, floor_tol, 0);
    prev = c;
  }
  return total;
}

// Kernel mass of an arc of length 2t with the kernel centre on the arc
// boundary, as a fraction of the circumference; increases to width^2/ell at
// t = ell/2 and has kinks at t = width/2 and t = (ell - width)/2.
double boundary_kernel_overlap(double t, double width, double ell) {
  const double m = std::min(2 * t, width);
  double v = width * m - m * m / 2;
  const double excess = 2 * t - (ell - width);
  if (excess > 0) v += excess * excess / 2;
  return v / ell;
}

// <state, point atom> = sum of count * (width - distance)_+ over the atoms.
double kernel_sum(const configuration& state, double point, double width) {
  double s = 0;
  for (const auto& at : state.atoms()) {
    const double k = width - arc_distance(point, at.location, state.circumference());
    if (k > 0) s += k * static_cast<double>(at.count);
  }
  return s;
}

// gaps[i] = arc from atom i to the next atom anticlockwise (ell for a single
// atom).
std::vector<double> gaps_after(const configuration& state) {
  const auto& atoms = state.atoms();
  std::vector<double> g(atoms.size());
  if (atoms.size() == 1) {
    g[0] = state.circumference();
    return g;
  }
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) g[i] = atoms[i + 1].location - atoms[i].location;
  g.back() = state.circumference() - atoms.back().location + atoms.front().location;
  return g;
}

}  // namespace

system_params::system_params(double lambda_, double scan_radius_, double circumference_,
                             interpolling_distribution dist_)
    : lambda(lambda_), scan_radius(scan_radius_), circumference(circumference_), dist(std::move(dist_)) {
  if (!(lambda > 0) || !std::isfinite(lambda)) throw std::invalid_argument("system_params: lambda must be positive");
  if (!(scan_radius > 0) || !std::isfinite(scan_radius))
    throw std::invalid_argument("system_params: scan radius must be positive");
  if (!(circumference > 0) || !std::isfinite(circumference))
    throw std::invalid_argument("system_params: circumference must be positive");
}

arrival_batch sample_interarrival_batch(const system_params& params, std::mt19937_64& rng) {
  arrival_batch batch;
  batch.interval = params.dist.sample(rng);
  const long n = batch.interval > 0 ? std::poisson_distribution<long>(params.lambda * batch.interval)(rng) : 0;
  batch.locations.resize(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> u(0.0, params.circumference);
  for (double& x : batch.locations) x = wrap_position(u(rng), params.circumference);
  return batch;
}

bool poll_in_place(configuration& state, double scan_location, const system_params& params,
                   std::mt19937_64& tie_rng) {
  if (state.empty()) return false;
  const double ell = state.circumference();
  const double z = wrap_position(scan_location, ell);
  const auto& atoms = state.atoms();
  std::size_t chosen = 0;
  if (atoms.size() > 1) {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), z,
                               [](const configuration::atom& at, double v) { return at.location < v; });
    const std::size_t succ = it == atoms.end() ? 0 : static_cast<std::size_t>(it - atoms.begin());
    const std::size_t pred = succ == 0 ? atoms.size() - 1 : succ - 1;
    const double dp = arc_distance(z, atoms[pred].location, ell);
    const double ds = arc_distance(z, atoms[succ].location, ell);
    if (dp < ds)
      chosen = pred;
    else if (ds < dp)
      chosen = succ;
    else
      chosen = std::uniform_int_distribution<int>(0, 1)(tie_rng) == 0 ? pred : succ;
  }
  const double rc = std::min(params.scan_radius, ell / 2);
  if (arc_distance(z, atoms[chosen].location, ell) > rc) return false;
  state.remove_one(chosen);
  return true;
}

configuration sample_poll(const configuration& state, const system_params& params, std::mt19937_64& rng) {
  check_state(state, params);
  configuration next = state;
  const double scan = std::uniform_real_distribution<double>(0.0, params.circumference)(rng);
  poll_in_place(next, scan, params, rng);
  return next;
}

poll_outcomes enumerate_poll_outcomes(const configuration& state, const system_params& params) {
  check_state(state, params);
  poll_outcomes out;
  out.entries.reserve(state.distinct_atoms() + 1);
  for (std::size_t i = 0; i < state.distinct_atoms(); ++i) {
    configuration next = state;
    next.remove_one(i);
    out.entries.push_back({std::move(next), cell_ball_measure_by_index(i, state, params.scan_radius)});
  }
  const double miss = 1 - union_balls_measure(state, params.scan_radius);
  out.entries.push_back({state, std::max(miss, 0.0)});
  return out;
}

double poll_outcomes::service_mass() const {
  double s = 0;
  for (std::size_t i = 0; i + 1 < entries.size(); ++i) s += entries[i].probability;
  return s;
}

double apply_polling_operator(const std::function<double(const configuration&)>& f, const configuration& state,
                              const system_params& params) {
  const poll_outcomes out = enumerate_poll_outcomes(state, params);
  double acc = 0;
  for (const auto& entry : out.entries) acc += entry.probability * f(entry.state);
  return acc;
}

double apply_arrival_operator(observable f, const configuration& state, const system_params& params, double tol,
                              const energy_params* ep) {
  check_state(state, params);
  if (!(tol > 0) || !(tol < 1)) throw std::invalid_argument("apply_arrival_operator: tol must lie in (0, 1)");
  if (f == observable::energy && ep == nullptr)
    throw std::invalid_argument("apply_arrival_operator: the energy observable needs kernel parameters");
  if (ep != nullptr) check_energy(params, *ep);

  const long nmax = params.dist.truncation_count(params.lambda, tol);
  const double tv = static_cast<double>(state.total_count());
  const double ball = ball_measure(params.scan_radius, params.circumference);
  const double covered = union_balls_measure(state, params.scan_radius);
  double base_energy = 0, width = 0, kernel_mass = 0;
  if (f == observable::energy) {
    base_energy = energy_value(state, *ep);
    width = ep->width;
    kernel_mass = width * width / params.circumference;
  }

  double mass = 0, acc = 0, miss_pow = 1;
  for (long n = 0; n <= nmax; ++n) {
    const double p = params.dist.mixed_poisson_pmf(params.lambda, n);
    double value = 1;
    switch (f) {
      case observable::unit:
        value = 1;
        break;
      case observable::population:
        value = tv + static_cast<double>(n);
        break;
      case observable::scan_success:
        value = 1 - (1 - covered) * miss_pow;
        break;
      case observable::energy:
        value = base_energy + 2 * static_cast<double>(n) * kernel_mass * tv + static_cast<double>(n) * width +
                static_cast<double>(n) * static_cast<double>(n - 1) * kernel_mass;
        break;
    }
    mass += p;
    acc += p * value;
    miss_pow *= 1 - ball;
  }
  if (!(mass > 0)) throw std::runtime_error("apply_arrival_operator: retained series mass vanished");
  return acc / mass;
}

double poll_cross_term(const configuration& state, const system_params& params, const energy_params& ep) {
  check_state(state, params);
  check_energy(params, ep);
  double total = 0;
  for (std::size_t i = 0; i < state.distinct_atoms(); ++i)
    total += kernel_sum(state, state.atoms()[i].location, ep.width) *
             cell_ball_measure_by_index(i, state, params.scan_radius);
  return total;
}

// E over one arrival batch of the kernel-weighted service measure.  The scan
// point is integrated out by conditioning on its nearest atom: either a fixed
// atom survives as nearest (no arrival lands closer), or some arrival does.
// Both branches reduce to one-dimensional integrals of the damped moments
// M_j(2*lambda*t/ell) against piecewise-smooth geometry factors.
double expected_poll_cross_term(const configuration& state, const system_params& params, const energy_params& ep) {
  check_state(state, params);
  check_energy(params, ep);
  const double ell = params.circumference;
  const double lam = params.lambda;
  const double width = ep.width;
  const double rc = std::min(params.scan_radius, ell / 2);
  const double kernel_mass = width * width / ell;  // normalized integral of the kernel
  const auto& dist = params.dist;

  auto m0 = [&](double t) { return dist.damped_moment(0, 2 * lam * t / ell); };
  auto m1 = [&](double t) { return dist.damped_moment(1, 2 * lam * t / ell); };
  auto m2 = [&](double t) { return dist.damped_moment(2, 2 * lam * t / ell); };

  // Location-free density of the arrival-nearest branch: own kernel mass of
  // the serving arrival plus the expected kernel of the other arrivals
  // outside the cleared arc.
  auto f_b = [&](double u) {
    return width * lam * m1(u) + (kernel_mass - boundary_kernel_overlap(u, width, ell)) * lam * lam * m2(u);
  };
  const std::vector<double> overlap_kinks = {width / 2, (ell - width) / 2};
  const double f_b_at_rc = panel_integrate(0, rc, overlap_kinks, f_b);

  if (state.empty()) return 2 / ell * f_b_at_rc;

  const auto& atoms = state.atoms();
  const std::size_t n = atoms.size();
  const std::vector<double> gaps = gaps_after(state);

  // Cumulative weight of an arrival landing within v of the scan point:
  // integral over [0, v] of lambda * M1(2*lambda*u/ell) du.
  auto f1 = [&](double v) { return ell / 2 * (1 - m0(v)); };

  double term_fixed = 0;         // a fixed atom stays nearest to the scan point
  double term_arrival_loc = 0;   // an arrival is nearest: kernel against the fixed atoms
  double term_arrival_free = 0;  // an arrival is nearest: location-free weight

  for (std::size_t i = 0; i < n; ++i) {
    const double k_at_atom = kernel_sum(state, atoms[i].location, width);
    const double gap_prev = gaps[(i + n - 1) % n];
    const double gap_next = gaps[i];
    for (const double halfgap : {gap_prev / 2, gap_next / 2}) {
      const double w = std::min(halfgap, rc);
      term_fixed += panel_integrate(0, w, overlap_kinks, [&](double t) {
        return k_at_atom * m0(t) + (kernel_mass - boundary_kernel_overlap(t, width, ell)) * lam * m1(t);
      });
      term_arrival_free += panel_integrate(0, w, overlap_kinks, [&](double u) { return (w - u) * f_b(u); });
      if (halfgap > rc) term_arrival_free += (halfgap - rc) * f_b_at_rc;
    }
  }

  // Breakpoints of the kernel sum: atoms, kernel edges and atom antipodes.
  std::vector<double> kernel_cuts;
  kernel_cuts.reserve(4 * n);
  for (const auto& at : atoms) {
    kernel_cuts.push_back(at.location);
    kernel_cuts.push_back(wrap_position(at.location + width, ell));
    kernel_cuts.push_back(wrap_position(at.location - width, ell));
    kernel_cuts.push_back(wrap_position(at.location + ell / 2, ell));
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double start = atoms[i].location;
    const double gap = gaps[i];
    std::vector<double> cuts;
    cuts.reserve(kernel_cuts.size() + 2);
    for (const double c : kernel_cuts) {
      const double local = start + wrap_position(c - start, ell);
      if (local > start && local < start + gap) cuts.push_back(local);
    }
    cuts.push_back(start + 2 * rc);
    cuts.push_back(start + gap - 2 * rc);
    term_arrival_loc += panel_integrate(start, start + gap, cuts, [&](double z) {
      const double back = std::min((z - start) / 2, rc);
      const double fwd = std::min((start + gap - z) / 2, rc);
      return kernel_sum(state, wrap_position(z, ell), width) * (f1(back) + f1(fwd));
    });
  }

  return term_fixed / ell + term_arrival_loc / (ell * ell) + 2 * term_arrival_free / (ell * ell);
}

double population_drift(const configuration& state, const system_params& params) {
  check_state(state, params);
  const double covered = union_balls_measure(state, params.scan_radius);
  const double ball = ball_measure(params.scan_radius, params.circumference);
  return params.load() - 1 + (1 - covered) * params.dist.damped_moment(0, params.lambda * ball);
}

double energy_drift(const configuration& state, const system_params& params, const energy_params& ep) {
  check_state(state, params);
  check_energy(params, ep);
  const double load = params.load();
  const double kernel_mass = ep.width * ep.width / params.circumference;
  const double tv = static_cast<double>(state.total_count());
  const double covered = union_balls_measure(state, params.scan_radius);
  const double ball = ball_measure(params.scan_radius, params.circumference);
  const double scanned = 1 - (1 - covered) * params.dist.damped_moment(0, params.lambda * ball);
  const double arrivals = 2 * load * kernel_mass * tv + load * ep.width +
                          params.lambda * params.lambda * params.dist.second_moment() * kernel_mass;
  return arrivals + ep.width * scanned - 2 * expected_poll_cross_term(state, params, ep);
}

double one_step_expectation(observable f, const configuration& state, const system_params& params, double tol,
                            const energy_params* ep) {
  check_state(state, params);
  if (!(tol > 0) || !(tol < 1)) throw std::invalid_argument("one_step_expectation: tol must lie in (0, 1)");
  switch (f) {
    case observable::unit:
      return 1;
    case observable::population:
      return static_cast<double>(state.total_count()) + population_drift(state, params);
    case observable::energy:
      if (ep == nullptr) throw std::invalid_argument("one_step_expectation: the energy observable needs kernel parameters");
      return energy_value(state, *ep) + energy_drift(state, params, *ep);
    case observable::scan_success:
      throw std::invalid_argument("one_step_expectation: the scan-success indicator is not supported");
  }
  throw std::logic_error("one_step_expectation: unreachable");
}

drift_margin seminorm_drift_margin(const system_params& params, const energy_params& ep) {
  check_energy(params, ep);
  if (params.circumference != 1.0)
    throw std::invalid_argument("seminorm_drift_margin: defined for circumference 1 only");
  const drift_bound b = drift_constants(params.lambda, params.dist.mean(), params.dist.second_moment(), ep);
  if (!(b.c1 > 0)) throw std::invalid_argument("seminorm_drift_margin: needs load below 1");
  drift_margin m;
  m.threshold = static_cast<long long>(std::ceil(2 * b.c2 / b.c1));
  if (m.threshold < 1) m.threshold = 1;
  m.alpha = b.c1 / 4;
  return m;
}

}  // namespace circlepoll
