#pragma once

#include <random>
#include <vector>

namespace circlepoll {

// Distribution of the time between consecutive scans.  Exposes the moments
// and transform values needed by the exact operator formulas, a sampler, and
// the mixed-Poisson law of the number of arrivals per interval.
class interpolling_distribution {
 public:
  enum class kind_t { exponential, deterministic, gamma, empirical };

  static interpolling_distribution exponential(double mean);
  static interpolling_distribution deterministic(double value);
  static interpolling_distribution gamma(double shape, double scale);
  static interpolling_distribution empirical(std::vector<double> samples);

  kind_t kind() const { return kind_; }
  double mean() const { return s1_; }           // s1
  double second_moment() const { return s2_; }  // s2
  // Largest theta with finite E[exp(theta * S)] (infinity when bounded).
  double mgf_bound() const { return mgf_bound_; }

  double sample(std::mt19937_64& rng) const;

  // P(N = n) where N | S ~ Poisson(lambda * S): closed form for the
  // exponential (geometric) and deterministic (Poisson) kinds, negative
  // binomial for gamma, exact finite average for empirical.
  double mixed_poisson_pmf(double lambda, long n) const;

  // E[exp(-theta * S)], defined for theta > -mgf_bound().
  double laplace(double theta) const;

  // E[S^j * exp(-theta * S)] for j in {0, 1, 2} and theta >= 0; these are the
  // only transform moments the exact drift evaluator needs.
  double damped_moment(int j, double theta) const;

  // Smallest n with cumulative mixed-Poisson mass >= 1 - tol; throws after
  // 10^6 terms.
  long truncation_count(double lambda, double tol) const;

  bool operator==(const interpolling_distribution& other) const;

 private:
  interpolling_distribution() = default;
  kind_t kind_ = kind_t::exponential;
  double p1_ = 0;  // mean / value / shape
  double p2_ = 0;  // scale (gamma)
  std::vector<double> samples_;
  double s1_ = 0;
  double s2_ = 0;
  double mgf_bound_ = 0;
};

}  // namespace circlepoll
