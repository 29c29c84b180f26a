#pragma once

// Entropy-bias corrections: how far the Tsallis (q = 2) or Shannon entropy
// of a sampling distribution falls short of the real distribution's.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tebc/core.hpp"
#include "tebc/random.hpp"

namespace tebc {

enum class BiasKind { FrequentistNaive, FrequentistBootstrap, BayesianUniform, ShannonMiller };

inline std::string_view to_string(BiasKind k) {
  switch (k) {
    case BiasKind::FrequentistNaive: return "frequentist_naive";
    case BiasKind::FrequentistBootstrap: return "frequentist_bootstrap";
    case BiasKind::BayesianUniform: return "bayesian_uniform";
    case BiasKind::ShannonMiller: return "shannon_miller";
  }
  return "unknown";
}

struct BiasEstimate {
  double delta = 0.0;
  BiasKind kind = BiasKind::FrequentistNaive;
  /// Least-squares slope K-hat (an estimate of T[P]); bootstrap only.
  std::optional<double> slope_khat;
  /// Standard error of delta propagated from the replicate variances; bootstrap only.
  std::optional<double> std_error;
  /// True when a negative raw bootstrap estimate was clamped to zero.
  bool clamped = false;

  bool is_shannon() const { return kind == BiasKind::ShannonMiller; }
};

struct BootstrapConfig {
  std::int64_t replicates_per_size = 200;
  std::vector<std::int64_t> size_grid;
  std::uint64_t seed = 0;

  /// 16 geometrically spaced sizes in [max(2, n/16), n-1], deduplicated.
  static std::vector<std::int64_t> default_grid(std::int64_t n) {
    const std::int64_t lo = std::max<std::int64_t>(2, n / 16);
    const std::int64_t hi = std::max(lo, n - 1);
    std::vector<std::int64_t> grid;
    constexpr int kPoints = 16;
    for (int j = 0; j < kPoints; ++j) {
      const double t = static_cast<double>(j) / (kPoints - 1);
      const double v = std::exp(std::log(static_cast<double>(lo)) * (1.0 - t) +
                                std::log(static_cast<double>(hi)) * t);
      auto size = std::clamp<std::int64_t>(std::llround(v), lo, hi);
      if (grid.empty() || grid.back() != size) grid.push_back(size);
    }
    return grid;
  }

  static BootstrapConfig defaults(std::int64_t n, std::uint64_t seed) {
    return BootstrapConfig{200, default_grid(n), seed};
  }
};

namespace detail {
inline void require_bins(std::int64_t m) {
  if (m < 2) throw std::invalid_argument("bin count m must be at least 2");
}
inline void require_draws(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("sample size n must be at least 1");
}
}  // namespace detail

/// Delta T = T[P-hat] / (n - 1).
inline BiasEstimate frequentist_teb_naive(const CountSample& s) {
  if (s.n() < 2) throw std::invalid_argument("sample too small for Frequentist-TEB");
  const double t = tsallis_entropy(s.to_distribution());
  return {std::max(0.0, t) / static_cast<double>(s.n() - 1), BiasKind::FrequentistNaive};
}

/// Delta T = (m - 1) / (n (m + 1)), the gap under a flat prior over the simplex.
inline BiasEstimate bayesian_teb(std::int64_t m, std::int64_t n) {
  detail::require_bins(m);
  detail::require_draws(n);
  const double md = static_cast<double>(m);
  return {(md - 1.0) / (static_cast<double>(n) * (md + 1.0)), BiasKind::BayesianUniform};
}

/// Miller's Shannon correction (m - 1) / (2n).
inline BiasEstimate seb(std::int64_t m, std::int64_t n) {
  detail::require_bins(m);
  detail::require_draws(n);
  return {(static_cast<double>(m) - 1.0) / (2.0 * static_cast<double>(n)),
          BiasKind::ShannonMiller};
}

/// Frequentist-TEB by subsampling. For each size i in the grid, draws B
/// subsamples of i items without replacement from the n observed items and
/// averages their Tsallis entropy E_i. The slope K of E_i ~ K (i-1)/i is fit
/// by least squares and delta = max(0, K - T[P-hat]).
inline BiasEstimate frequentist_teb_bootstrap(const CountSample& s, const BootstrapConfig& cfg) {
  const std::int64_t n = s.n();
  if (n < 2) throw std::invalid_argument("sample too small for Frequentist-TEB");
  if (cfg.size_grid.empty()) throw std::invalid_argument("bootstrap size grid is empty");
  if (cfg.replicates_per_size < 1) throw std::invalid_argument("replicates_per_size must be >= 1");
  for (auto i : cfg.size_grid) {
    if (i < 2 || i > n) {
      throw std::invalid_argument("bootstrap size " + std::to_string(i) + " outside [2, n]");
    }
  }

  // Flatten the sample to item labels so subsamples are partial shuffles.
  std::vector<std::uint32_t> items;
  items.reserve(static_cast<std::size_t>(n));
  for (std::size_t b = 0; b < s.bins(); ++b) {
    items.insert(items.end(), static_cast<std::size_t>(s[b]), static_cast<std::uint32_t>(b));
  }

  Rng rng(cfg.seed);
  std::vector<std::int64_t> tally(s.bins(), 0);
  double numer = 0.0, denom = 0.0, var_numer = 0.0;
  for (auto size : cfg.size_grid) {
    const auto k = static_cast<std::size_t>(size);
    double mean = 0.0, m2 = 0.0;
    for (std::int64_t rep = 0; rep < cfg.replicates_per_size; ++rep) {
      for (std::size_t j = 0; j < k; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, items.size() - 1);
        std::swap(items[j], items[pick(rng)]);
      }
      std::fill(tally.begin(), tally.end(), 0);
      for (std::size_t j = 0; j < k; ++j) ++tally[items[j]];
      double sq = 0.0;
      for (auto c : tally) sq += static_cast<double>(c * c);
      const double t = 1.0 - sq / static_cast<double>(size * size);
      // Welford update.
      const double d = t - mean;
      mean += d / static_cast<double>(rep + 1);
      m2 += d * (t - mean);
    }
    const double w = static_cast<double>(size - 1) / static_cast<double>(size);
    numer += w * mean;
    denom += w * w;
    if (cfg.replicates_per_size > 1) {
      const double var_mean = m2 / static_cast<double>(cfg.replicates_per_size - 1) /
                              static_cast<double>(cfg.replicates_per_size);
      var_numer += w * w * var_mean;
    }
  }

  const double khat = numer / denom;
  const double raw = khat - tsallis_entropy(s.to_distribution());
  BiasEstimate out;
  out.kind = BiasKind::FrequentistBootstrap;
  out.slope_khat = khat;
  out.std_error = std::sqrt(var_numer) / denom;
  out.delta = std::max(0.0, raw);
  out.clamped = raw < 0.0;
  return out;
}

/// Expected Tsallis entropy of a size-n sampling distribution: (n-1)/n T[d].
inline double expected_sampling_tsallis(const Distribution& d, std::int64_t n) {
  detail::require_draws(n);
  const double nd = static_cast<double>(n);
  return (nd - 1.0) / nd * tsallis_entropy(d);
}

/// Mean of (n-1)/n T[P] when P is drawn from the flat prior on the simplex.
inline double bayesian_expected_sampling_tsallis(std::int64_t m, std::int64_t n) {
  detail::require_bins(m);
  detail::require_draws(n);
  const double md = static_cast<double>(m), nd = static_cast<double>(n);
  return (nd - 1.0) * (md - 1.0) / (nd * (md + 1.0));
}

/// Standard deviation of (n-1)/n T[P] under the flat prior on the simplex.
inline double teb_std(std::int64_t m, std::int64_t n) {
  detail::require_bins(m);
  detail::require_draws(n);
  const double md = static_cast<double>(m);
  return 2.0 / std::sqrt((md - 1.0) * (md + 2.0) * (md + 3.0)) *
         bayesian_expected_sampling_tsallis(m, n);
}

}  // namespace tebc
