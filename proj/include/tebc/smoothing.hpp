#pragma once

// Additive (Lidstone) smoothing with entropy-bias-adaptive rates, and the
// Good-Turing baselines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tebc/core.hpp"
#include "tebc/teb.hpp"

namespace tebc {

/// Rate used in place of an infinite f (the estimate is then uniform to ~1e-9 relative).
inline constexpr double kLidstoneRateCap = 1e9;

/// (x_i + f) / (n + f m).
inline Distribution lidstone(const CountSample& s, double f) {
  if (!(f >= 0.0) || !std::isfinite(f)) throw std::invalid_argument("Lidstone rate must be finite and >= 0");
  const double denom = static_cast<double>(s.n()) + f * static_cast<double>(s.bins());
  std::vector<double> p(s.bins());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = (static_cast<double>(s[i]) + f) / denom;
  return Distribution::normalize(std::move(p));
}

enum class NamedLidstone { Laplace, ELE, AddTiny };

inline double named_rate(NamedLidstone name, std::int64_t n) {
  switch (name) {
    case NamedLidstone::Laplace: return 1.0;
    case NamedLidstone::ELE: return 0.5;
    case NamedLidstone::AddTiny: return 1.0 / static_cast<double>(n);
  }
  return 0.0;
}

inline Distribution named_lidstone(const CountSample& s, NamedLidstone name) {
  return lidstone(s, named_rate(name, s.n()));
}

enum class LidstoneClamp { None, AtZero, AtUniformCap, VertexFallback };

inline std::string_view to_string(LidstoneClamp c) {
  switch (c) {
    case LidstoneClamp::None: return "none";
    case LidstoneClamp::AtZero: return "at_zero";
    case LidstoneClamp::AtUniformCap: return "at_uniform_cap";
    case LidstoneClamp::VertexFallback: return "vertex_fallback";
  }
  return "unknown";
}

struct LidstoneFit {
  double f = 0.0;
  /// 1 - (T[p-hat] + delta), the target sum of squares; NaN for the Shannon fit.
  double alpha = std::numeric_limits<double>::quiet_NaN();
  LidstoneClamp clamped = LidstoneClamp::None;
};

/// Rate f such that the Tsallis entropy of lidstone(s, f) equals
/// T[p-hat] + delta. Expanding sum (x_i + f)^2 = alpha (n + f m)^2 gives
///   (alpha m^2 - m) f^2 + 2n (alpha m - 1) f + (alpha n^2 - sum x_i^2) = 0.
inline LidstoneFit solve_teb_lidstone_f(const CountSample& s, const BiasEstimate& bias) {
  if (bias.is_shannon()) throw std::invalid_argument("TEB-Lidstone needs a Tsallis bias estimate");
  const double m = static_cast<double>(s.bins());
  const double n = static_cast<double>(s.n());
  const double sum_sq = static_cast<double>(s.sum_of_squares());
  const double sample_alpha = sum_sq / (n * n);

  LidstoneFit fit;
  fit.alpha = sample_alpha - bias.delta;
  const double alpha = fit.alpha;
  if (bias.delta <= 0.0) {
    fit.f = 0.0;
    fit.clamped = bias.delta < 0.0 ? LidstoneClamp::AtZero : LidstoneClamp::None;
    return fit;
  }
  if (alpha * m <= 1.0) {
    // Target at or beyond the uniform distribution's entropy.
    fit.f = kLidstoneRateCap;
    fit.clamped = LidstoneClamp::AtUniformCap;
    return fit;
  }

  const double a = alpha * m * m - m;
  const double b = 2.0 * n * (alpha * m - 1.0);
  const double c = alpha * n * n - sum_sq;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    // Vertex of the quadratic; a > 0 here, so this is its minimum.
    fit.f = std::max(0.0, -b / (2.0 * a));
    fit.clamped = LidstoneClamp::VertexFallback;
    return fit;
  }
  // a > 0, b > 0 and c < 0: one positive and one negative root. The
  // cancellation-free form of the positive root is 2c / (-b - sqrt(disc)).
  const double root = (2.0 * c) / (-b - std::sqrt(disc));
  fit.f = std::max(0.0, root);
  return fit;
}

/// Rate f such that the Shannon entropy of lidstone(s, f) equals
/// S[p-hat] + delta, by bisection on the mixing weight toward uniform.
inline LidstoneFit solve_seb_lidstone_f(const CountSample& s, const BiasEstimate& bias) {
  if (!bias.is_shannon()) throw std::invalid_argument("SEB-Lidstone needs a Shannon bias estimate");
  const auto phat = s.to_distribution();
  const double m = static_cast<double>(s.bins());
  const double n = static_cast<double>(s.n());
  const double base = shannon_entropy(phat);
  const double target = base + bias.delta;

  LidstoneFit fit;
  if (bias.delta <= 0.0) {
    fit.clamped = bias.delta < 0.0 ? LidstoneClamp::AtZero : LidstoneClamp::None;
    return fit;
  }
  if (target >= std::log(m)) {
    fit.f = kLidstoneRateCap;
    fit.clamped = LidstoneClamp::AtUniformCap;
    return fit;
  }
  // lidstone(s, f) = (1 - w) p-hat + w u with w = f m / (n + f m).
  auto entropy_at = [&](double w) {
    double h = 0.0;
    for (std::size_t i = 0; i < phat.size(); ++i) {
      const double p = (1.0 - w) * phat[i] + w / m;
      if (p > 0.0) h -= p * std::log(p);
    }
    return h;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (entropy_at(mid) < target ? lo : hi) = mid;
  }
  const double w = 0.5 * (lo + hi);
  fit.f = std::min(kLidstoneRateCap, n * w / (m * (1.0 - w)));
  return fit;
}

namespace detail {

/// Count-of-counts: observed count r -> number of bins with exactly r.
inline std::map<std::int64_t, std::int64_t> count_of_counts(const CountSample& s) {
  std::map<std::int64_t, std::int64_t> cc;
  for (auto c : s.counts()) {
    if (c > 0) ++cc[c];
  }
  return cc;
}

/// Places `zero_mass` uniformly on unobserved bins and scales the observed
/// bins' weights to fill the rest.
inline Distribution spread_with_zero_mass(const CountSample& s, const std::vector<double>& observed,
                                          double zero_mass) {
  std::size_t zeros = 0;
  double observed_total = 0.0;
  for (std::size_t i = 0; i < s.bins(); ++i) {
    if (s[i] == 0) {
      ++zeros;
    } else {
      observed_total += observed[i];
    }
  }
  if (zeros == 0) zero_mass = 0.0;
  std::vector<double> p(s.bins(), 0.0);
  for (std::size_t i = 0; i < s.bins(); ++i) {
    p[i] = s[i] == 0 ? zero_mass / static_cast<double>(zeros)
                     : (1.0 - zero_mass) * observed[i] / observed_total;
  }
  return Distribution::normalize(std::move(p));
}

}  // namespace detail

/// Turing's estimate with raw counts-of-counts: r* = (r + 1) E(r+1) / E(r).
/// Bins whose E(r+1) is zero keep their raw count. Unobserved bins share E(1)/n.
inline Distribution good_turing_simplest(const CountSample& s) {
  const auto cc = detail::count_of_counts(s);
  std::vector<double> adjusted(s.bins(), 0.0);
  for (std::size_t i = 0; i < s.bins(); ++i) {
    const auto r = s[i];
    if (r == 0) continue;
    const auto next = cc.find(r + 1);
    adjusted[i] = next == cc.end()
                      ? static_cast<double>(r)
                      : static_cast<double>(r + 1) * static_cast<double>(next->second) /
                            static_cast<double>(cc.at(r));
  }
  const auto ones = cc.find(1);
  const double zero_mass =
      ones == cc.end() ? 0.0 : static_cast<double>(ones->second) / static_cast<double>(s.n());
  return detail::spread_with_zero_mass(s, adjusted, zero_mass);
}

/// Gale and Sampson's Simple Good-Turing: averaged counts-of-counts
/// Z_r = N_r / (0.5 (t - q)), a log-log least-squares line for smoothed
/// N_r, and Turing estimates for small r until they stop differing
/// significantly (1.96 sigma) from the line.
inline Distribution simple_good_turing(const CountSample& s) {
  const auto cc = detail::count_of_counts(s);
  if (cc.size() < 2) return good_turing_simplest(s);

  std::vector<std::int64_t> r;
  std::vector<double> nr;
  for (const auto& [count, bins] : cc) {
    r.push_back(count);
    nr.push_back(static_cast<double>(bins));
  }
  const std::size_t rows = r.size();
  std::vector<double> log_r(rows), log_z(rows);
  for (std::size_t j = 0; j < rows; ++j) {
    const double q = j == 0 ? 0.0 : static_cast<double>(r[j - 1]);
    const double t = j + 1 == rows ? 2.0 * static_cast<double>(r[j]) - q
                                   : static_cast<double>(r[j + 1]);
    log_r[j] = std::log(static_cast<double>(r[j]));
    log_z[j] = std::log(nr[j] / (0.5 * (t - q)));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < rows; ++j) {
    mx += log_r[j];
    my += log_z[j];
  }
  mx /= static_cast<double>(rows);
  my /= static_cast<double>(rows);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t j = 0; j < rows; ++j) {
    sxy += (log_r[j] - mx) * (log_z[j] - my);
    sxx += (log_r[j] - mx) * (log_r[j] - mx);
  }
  if (!(sxx > 0.0)) return good_turing_simplest(s);
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  if (!std::isfinite(slope) || !std::isfinite(intercept)) return good_turing_simplest(s);
  auto smoothed = [&](double count) { return std::exp(intercept + slope * std::log(count)); };

  std::map<std::int64_t, double> r_star;
  bool use_line = false;
  for (std::size_t j = 0; j < rows; ++j) {
    const double rj = static_cast<double>(r[j]);
    const double y = (rj + 1.0) * smoothed(rj + 1.0) / smoothed(rj);
    const auto next = cc.find(r[j] + 1);
    if (!use_line && next == cc.end()) use_line = true;
    if (!use_line) {
      const double n1 = static_cast<double>(next->second);
      const double x = (rj + 1.0) * n1 / nr[j];
      const double sd = std::sqrt((rj + 1.0) * (rj + 1.0) * n1 / (nr[j] * nr[j]) * (1.0 + n1 / nr[j]));
      if (std::abs(x - y) > 1.96 * sd) {
        r_star[r[j]] = x;
        continue;
      }
      use_line = true;
    }
    r_star[r[j]] = y;
  }

  std::vector<double> adjusted(s.bins(), 0.0);
  for (std::size_t i = 0; i < s.bins(); ++i) {
    if (s[i] > 0) adjusted[i] = r_star.at(s[i]);
  }
  const auto ones = cc.find(1);
  const double zero_mass =
      ones == cc.end() ? 0.0 : static_cast<double>(ones->second) / static_cast<double>(s.n());
  return detail::spread_with_zero_mass(s, adjusted, zero_mass);
}

}  // namespace tebc
