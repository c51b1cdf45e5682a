#include "circlepoll/interpolling.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace circlepoll {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kMaxTerms = 1000000;
}  // namespace

interpolling_distribution interpolling_distribution::exponential(double mean) {
  if (!(mean > 0) || !std::isfinite(mean)) throw std::invalid_argument("exponential interpolling: mean must be positive");
  interpolling_distribution d;
  d.kind_ = kind_t::exponential;
  d.p1_ = mean;
  d.s1_ = mean;
  d.s2_ = 2 * mean * mean;
  d.mgf_bound_ = 1 / mean;
  return d;
}

interpolling_distribution interpolling_distribution::deterministic(double value) {
  if (!(value > 0) || !std::isfinite(value))
    throw std::invalid_argument("deterministic interpolling: value must be positive");
  interpolling_distribution d;
  d.kind_ = kind_t::deterministic;
  d.p1_ = value;
  d.s1_ = value;
  d.s2_ = value * value;
  d.mgf_bound_ = kInf;
  return d;
}

interpolling_distribution interpolling_distribution::gamma(double shape, double scale) {
  if (!(shape > 0) || !(scale > 0) || !std::isfinite(shape) || !std::isfinite(scale))
    throw std::invalid_argument("gamma interpolling: shape and scale must be positive");
  interpolling_distribution d;
  d.kind_ = kind_t::gamma;
  d.p1_ = shape;
  d.p2_ = scale;
  d.s1_ = shape * scale;
  d.s2_ = shape * (shape + 1) * scale * scale;
  d.mgf_bound_ = 1 / scale;
  return d;
}

interpolling_distribution interpolling_distribution::empirical(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("empirical interpolling: sample list is empty");
  double m1 = 0, m2 = 0;
  for (double s : samples) {
    if (!(s >= 0) || !std::isfinite(s)) throw std::invalid_argument("empirical interpolling: samples must be >= 0");
    m1 += s;
    m2 += s * s;
  }
  m1 /= static_cast<double>(samples.size());
  m2 /= static_cast<double>(samples.size());
  if (!(m1 > 0)) throw std::invalid_argument("empirical interpolling: mean must be positive");
  interpolling_distribution d;
  d.kind_ = kind_t::empirical;
  d.samples_ = std::move(samples);
  d.s1_ = m1;
  d.s2_ = m2;
  d.mgf_bound_ = kInf;
  return d;
}

double interpolling_distribution::sample(std::mt19937_64& rng) const {
  switch (kind_) {
    case kind_t::exponential:
      return std::exponential_distribution<double>(1 / p1_)(rng);
    case kind_t::deterministic:
      return p1_;
    case kind_t::gamma:
      return std::gamma_distribution<double>(p1_, p2_)(rng);
    case kind_t::empirical: {
      std::uniform_int_distribution<std::size_t> pick(0, samples_.size() - 1);
      return samples_[pick(rng)];
    }
  }
  return 0;
}

namespace {

double poisson_pmf(double mu, long n) {
  if (mu == 0) return n == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(n) * std::log(mu) - mu - std::lgamma(static_cast<double>(n) + 1));
}

}  // namespace

double interpolling_distribution::mixed_poisson_pmf(double lambda, long n) const {
  if (!(lambda > 0)) throw std::invalid_argument("mixed_poisson_pmf: lambda must be positive");
  if (n < 0) throw std::invalid_argument("mixed_poisson_pmf: n must be >= 0");
  switch (kind_) {
    case kind_t::exponential: {
      const double q = lambda * p1_ / (1 + lambda * p1_);
      return (1 - q) * std::pow(q, static_cast<double>(n));
    }
    case kind_t::deterministic:
      return poisson_pmf(lambda * p1_, n);
    case kind_t::gamma: {
      // Gamma mixing integrates to a negative binomial in closed form.
      const double p = 1 / (1 + lambda * p2_);
      const double k = p1_;
      const double nd = static_cast<double>(n);
      return std::exp(std::lgamma(nd + k) - std::lgamma(k) - std::lgamma(nd + 1) + k * std::log(p) +
                      nd * std::log1p(-p));
    }
    case kind_t::empirical: {
      double s = 0;
      for (double v : samples_) s += poisson_pmf(lambda * v, n);
      return s / static_cast<double>(samples_.size());
    }
  }
  return 0;
}

double interpolling_distribution::laplace(double theta) const {
  if (!(theta > -mgf_bound_))
    throw std::invalid_argument("laplace: theta outside the transform's domain");
  switch (kind_) {
    case kind_t::exponential:
      return 1 / (1 + theta * p1_);
    case kind_t::deterministic:
      return std::exp(-theta * p1_);
    case kind_t::gamma:
      return std::pow(1 + theta * p2_, -p1_);
    case kind_t::empirical: {
      double s = 0;
      for (double v : samples_) s += std::exp(-theta * v);
      return s / static_cast<double>(samples_.size());
    }
  }
  return 0;
}

double interpolling_distribution::damped_moment(int j, double theta) const {
  if (j < 0 || j > 2) throw std::invalid_argument("damped_moment: order must be 0, 1 or 2");
  if (!(theta >= 0)) throw std::invalid_argument("damped_moment: theta must be >= 0");
  switch (kind_) {
    case kind_t::exponential: {
      const double b = 1 + theta * p1_;
      if (j == 0) return 1 / b;
      if (j == 1) return p1_ / (b * b);
      return 2 * p1_ * p1_ / (b * b * b);
    }
    case kind_t::deterministic:
      return std::pow(p1_, j) * std::exp(-theta * p1_);
    case kind_t::gamma: {
      const double b = 1 + theta * p2_;
      if (j == 0) return std::pow(b, -p1_);
      if (j == 1) return p1_ * p2_ * std::pow(b, -(p1_ + 1));
      return p1_ * (p1_ + 1) * p2_ * p2_ * std::pow(b, -(p1_ + 2));
    }
    case kind_t::empirical: {
      double s = 0;
      for (double v : samples_) s += std::pow(v, j) * std::exp(-theta * v);
      return s / static_cast<double>(samples_.size());
    }
  }
  return 0;
}

long interpolling_distribution::truncation_count(double lambda, double tol) const {
  if (!(tol > 0) || !(tol < 1)) throw std::invalid_argument("truncation_count: tol must lie in (0, 1)");
  double cum = 0;
  for (long n = 0; n < kMaxTerms; ++n) {
    cum += mixed_poisson_pmf(lambda, n);
    if (cum >= 1 - tol) return n;
  }
  throw std::runtime_error("truncation_count: series did not reach the target mass within 10^6 terms");
}

bool interpolling_distribution::operator==(const interpolling_distribution& other) const {
  return kind_ == other.kind_ && p1_ == other.p1_ && p2_ == other.p2_ && samples_ == other.samples_;
}

}  // namespace circlepoll
