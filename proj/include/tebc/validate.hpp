#pragma once

// Independent numerical checks of the closed-form TEB results: exact
// enumeration over all multinomial outcomes, and Monte Carlo over the flat
// prior on the simplex.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tebc/core.hpp"
#include "tebc/random.hpp"
#include "tebc/teb.hpp"

namespace tebc {

inline constexpr double kDefaultOutcomeCap = 2e6;

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct ValidationReport {
  enum class Mode { Enumeration, MonteCarlo, RelativeError };

  Mode mode = Mode::Enumeration;
  double closed_form = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t draws_or_outcomes = 0;
  bool passed = false;
  /// Sigmas (MonteCarlo), absolute tolerance (Enumeration), or relative tolerance.
  double tolerance = 0.0;
};

struct WeightedOutcome {
  CountSample sample;
  double probability;
};

/// Number of size-n outcomes over m bins, C(n+m-1, m-1), in floating point.
inline double outcome_count(std::int64_t m, std::int64_t n) {
  return std::round(std::exp(std::lgamma(static_cast<double>(n + m)) -
                             std::lgamma(static_cast<double>(m)) -
                             std::lgamma(static_cast<double>(n + 1))));
}

/// Every multinomial outcome of size n with its probability under d.
/// Uses 0^0 = 1, so a zero count in a zero-probability bin is harmless.
inline std::vector<WeightedOutcome> enumerate_sampling_law(const Distribution& d, std::int64_t n,
                                                           double cap = kDefaultOutcomeCap) {
  detail::require_draws(n);
  const auto m = static_cast<std::int64_t>(d.size());
  if (outcome_count(m, n) > cap) {
    throw std::length_error("multinomial enumeration exceeds the outcome cap");
  }
  std::vector<double> log_p(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    log_p[i] = d[i] > 0.0 ? std::log(d[i]) : -std::numeric_limits<double>::infinity();
  }
  const double log_nfact = std::lgamma(static_cast<double>(n + 1));

  std::vector<WeightedOutcome> out;
  std::vector<std::int64_t> x(d.size(), 0);
  x[0] = n;
  // Walk compositions in reverse-lexicographic order.
  while (true) {
    double lp = log_nfact;
    bool possible = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0) continue;
      if (d[i] == 0.0) {
        possible = false;
        break;
      }
      lp += static_cast<double>(x[i]) * log_p[i] - std::lgamma(static_cast<double>(x[i] + 1));
    }
    out.push_back({CountSample(x), possible ? std::exp(lp) : 0.0});

    // Next composition: move one unit from the rightmost nonzero non-last slot.
    std::size_t j = x.size() - 1;
    const std::int64_t tail = x[j];
    x[j] = 0;
    std::size_t k = j;
    while (k > 0 && x[k - 1] == 0) --k;
    if (k == 0) break;
    --x[k - 1];
    x[k] = tail + 1;
  }
  return out;
}

/// E[T[P-hat]] by exact enumeration against (n-1)/n T[d].
inline ValidationReport validate_prop1(const Distribution& d, std::int64_t n,
                                       double tolerance = 1e-10,
                                       double cap = kDefaultOutcomeCap) {
  const auto outcomes = enumerate_sampling_law(d, n, cap);
  CompensatedSum expectation;
  for (const auto& o : outcomes) {
    if (o.probability == 0.0) continue;
    expectation.add(tsallis_entropy(o.sample.to_distribution()) * o.probability);
  }
  ValidationReport r;
  r.mode = ValidationReport::Mode::Enumeration;
  r.closed_form = expected_sampling_tsallis(d, n);
  r.estimate = expectation.value();
  r.draws_or_outcomes = static_cast<std::int64_t>(outcomes.size());
  r.tolerance = tolerance;
  r.passed = std::abs(r.estimate - r.closed_form) <= tolerance;
  return r;
}

namespace detail {
/// Draws (n-1)/n T[P] for P uniform on the simplex; returns the per-draw values.
inline std::vector<double> sampled_expected_tsallis(std::int64_t m, std::int64_t n,
                                                    std::int64_t draws, std::uint64_t seed) {
  detail::require_bins(m);
  detail::require_draws(n);
  if (draws < 1000) throw std::invalid_argument("Monte Carlo validation needs at least 1000 draws");
  Rng rng(derive_seed(seed, {0x7072'6f70ULL, static_cast<std::uint64_t>(m),
                             static_cast<std::uint64_t>(n)}));
  std::vector<double> values(static_cast<std::size_t>(draws));
  for (auto& v : values) {
    v = expected_sampling_tsallis(draw_uniform_simplex(static_cast<std::size_t>(m), rng), n);
  }
  return values;
}

inline std::pair<double, double> mean_and_std(const std::vector<double>& values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  const double mean = s.value() / static_cast<double>(values.size());
  CompensatedSum ss;
  for (double v : values) ss.add((v - mean) * (v - mean));
  return {mean, std::sqrt(ss.value() / static_cast<double>(values.size() - 1))};
}
}  // namespace detail

/// Flat-prior mean of (n-1)/n T[P] against (n-1)(m-1)/(n(m+1)).
inline ValidationReport validate_prop2(std::int64_t m, std::int64_t n, std::int64_t draws,
                                       std::uint64_t seed, double sigmas = 4.0) {
  const auto values = detail::sampled_expected_tsallis(m, n, draws, seed);
  const auto [mean, sd] = detail::mean_and_std(values);
  ValidationReport r;
  r.mode = ValidationReport::Mode::MonteCarlo;
  r.closed_form = bayesian_expected_sampling_tsallis(m, n);
  r.estimate = mean;
  r.std_error = sd / std::sqrt(static_cast<double>(draws));
  r.draws_or_outcomes = draws;
  r.tolerance = sigmas;
  r.passed = std::abs(r.estimate - r.closed_form) <= sigmas * r.std_error;
  return r;
}

/// Flat-prior standard deviation of (n-1)/n T[P] against teb_std(m, n).
/// std_error is the large-sample standard error of a sample standard deviation.
inline ValidationReport validate_prop3(std::int64_t m, std::int64_t n, std::int64_t draws,
                                       std::uint64_t seed, double relative_tolerance = 0.05) {
  const auto values = detail::sampled_expected_tsallis(m, n, draws, seed);
  const auto [mean, sd] = detail::mean_and_std(values);
  // SE(sd) ~ sd * sqrt((kurtosis - 1) / (4 N)).
  CompensatedSum m4;
  for (double v : values) m4.add(std::pow(v - mean, 4));
  const double kurt = m4.value() / static_cast<double>(draws) / std::pow(sd, 4);
  ValidationReport r;
  r.mode = ValidationReport::Mode::RelativeError;
  r.closed_form = teb_std(m, n);
  r.estimate = sd;
  r.std_error = sd * std::sqrt(std::max(0.0, kurt - 1.0) / (4.0 * static_cast<double>(draws)));
  r.draws_or_outcomes = draws;
  r.tolerance = relative_tolerance;
  r.passed = std::abs(r.estimate - r.closed_form) <= relative_tolerance * r.closed_form;
  return r;
}

}  // namespace tebc
