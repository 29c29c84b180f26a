#pragma once

// Probability vectors, count samples, and the entropy / divergence
// functionals shared by every estimator in the toolkit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tebc {

/// Tolerance used when validating that a vector lies on the simplex.
inline constexpr double kSimplexTolerance = 1e-12;

class Distribution {
 public:
  Distribution() = default;

  /// Validates `probs` without touching it. Throws std::invalid_argument
  /// when m < 2, an entry is negative or non-finite, or the sum is off by
  /// more than kSimplexTolerance.
  explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2) {
      throw std::invalid_argument("distribution needs at least 2 bins");
    }
    double total = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p) || p < 0.0) {
        throw std::invalid_argument("distribution entries must be finite and nonnegative");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
      throw std::invalid_argument("distribution does not sum to 1 (sum = " +
                                  std::to_string(total) + ")");
    }
  }

  /// Explicit renormalization of a nonnegative weight vector.
  static Distribution normalize(std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0) {
        throw std::invalid_argument("weights must be finite and nonnegative");
      }
      total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("weights sum to zero");
    for (double& w : weights) w /= total;
    // Division leaves a residual of a few ulps; fold it into the largest entry.
    double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    auto largest = std::max_element(weights.begin(), weights.end());
    *largest += 1.0 - sum;
    return Distribution(std::move(weights));
  }

  static Distribution uniform(std::size_t m) {
    return Distribution(std::vector<double>(m, 1.0 / static_cast<double>(m)));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vector() const { return probs_; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> probs_;
};

class CountSample {
 public:
  CountSample() = default;

  explicit CountSample(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
    if (counts_.size() < 2) throw std::invalid_argument("count sample needs at least 2 bins");
    for (auto c : counts_) {
      if (c < 0) throw std::invalid_argument("counts must be nonnegative");
      n_ += c;
    }
    if (n_ < 1) throw std::invalid_argument("count sample must contain at least one draw");
  }

  std::size_t bins() const { return counts_.size(); }
  std::int64_t n() const { return n_; }
  std::int64_t operator[](std::size_t i) const { return counts_[i]; }
  std::span<const std::int64_t> counts() const { return counts_; }

  /// Sum of squared counts, exact in integer arithmetic.
  std::int64_t sum_of_squares() const {
    std::int64_t s = 0;
    for (auto c : counts_) s += c * c;
    return s;
  }

  /// The sampling distribution x_i / n.
  Distribution to_distribution() const {
    std::vector<double> p(counts_.size());
    const double n = static_cast<double>(n_);
    for (std::size_t i = 0; i < counts_.size(); ++i) p[i] = static_cast<double>(counts_[i]) / n;
    return Distribution::normalize(std::move(p));
  }

  friend bool operator==(const CountSample&, const CountSample&) = default;

 private:
  std::vector<std::int64_t> counts_;
  std::int64_t n_ = 0;
};

/// Tsallis entropy with q = 2: 1 - sum p_i^2.
inline double tsallis_entropy(std::span<const double> p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return 1.0 - s;
}
inline double tsallis_entropy(const Distribution& d) { return tsallis_entropy(d.probs()); }

/// Shannon entropy in nats, with 0 ln 0 = 0.
inline double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}
inline double shannon_entropy(const Distribution& d) { return shannon_entropy(d.probs()); }

namespace detail {
inline void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("distribution lengths differ");
}
}  // namespace detail

/// D[p|q] in nats. +infinity when p puts mass where q has none.
inline double kl_divergence(const Distribution& p, const Distribution& q) {
  detail::require_same_length(p.size(), q.size());
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / q[i]);
  }
  // Rounding can leave a tiny negative value for p == q.
  return d < 0.0 ? 0.0 : d;
}

/// Jensen-Shannon divergence: mean KL of each argument to their midpoint.
inline double js_divergence(const Distribution& p, const Distribution& q) {
  detail::require_same_length(p.size(), q.size());
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double mid = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) d += 0.5 * p[i] * std::log(p[i] / mid);
    if (q[i] > 0.0) d += 0.5 * q[i] * std::log(q[i] / mid);
  }
  if (d < 0.0) return 0.0;
  return std::min(d, std::log(2.0));
}

}  // namespace tebc
