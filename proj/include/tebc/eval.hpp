#pragma once

// Evaluation criteria and the cross-method Performance Score.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tebc/core.hpp"

namespace tebc {

enum class Criterion { JsDivergence, ExpectedLogLoss };

inline std::string_view to_string(Criterion c) {
  return c == Criterion::JsDivergence ? "jsd" : "expected_log_loss";
}

/// -n sum p_i ln(est_i); +infinity when est misses real mass.
inline double expected_log_loss(const Distribution& real, const Distribution& est, std::int64_t n) {
  detail::require_same_length(real.size(), est.size());
  if (n < 1) throw std::invalid_argument("sample size n must be at least 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < real.size(); ++i) {
    if (real[i] == 0.0) continue;
    if (est[i] == 0.0) return std::numeric_limits<double>::infinity();
    acc -= real[i] * std::log(est[i]);
  }
  return static_cast<double>(n) * acc;
}

inline double criterion_value(Criterion c, const Distribution& real, const Distribution& est,
                              std::int64_t n) {
  return c == Criterion::JsDivergence ? js_divergence(real, est) : expected_log_loss(real, est, n);
}

/// Lower-is-better values -> scores in [0, 1], best = 1, worst = 0.
/// Infinite values score 0 and finite ones are spread between the best and
/// the worst finite value. If every finite value ties, they all score 1.
inline std::map<std::string, double> performance_score(const std::map<std::string, double>& values) {
  if (values.empty()) throw std::invalid_argument("performance score needs at least one method");
  double best = std::numeric_limits<double>::infinity();
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [name, v] : values) {
    if (std::isnan(v)) throw std::invalid_argument("performance score value for " + name + " is NaN");
    if (std::isinf(v)) continue;
    best = std::min(best, v);
    worst = std::max(worst, v);
  }
  std::map<std::string, double> out;
  for (const auto& [name, v] : values) {
    if (std::isinf(v)) {
      out[name] = 0.0;
    } else if (best == worst) {
      out[name] = 1.0;
    } else {
      out[name] = std::clamp((v - worst) / (best - worst), 0.0, 1.0) + 0.0;  // no -0 in reports
    }
  }
  return out;
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

enum class PsMode {
  /// Average each method's criterion over replicates, then score once.
  AverageThenScore,
  /// Score every replicate separately, then average the scores.
  ScoreThenAverage,
};

struct MethodScore {
  double mean_value = 0.0;
  double performance_score = 0.0;
};

/// Scores one (dataset, criterion) table. `replicates` maps method -> one
/// value per replicate; every method must have the same replicate count.
inline std::map<std::string, MethodScore> score_table(
    const std::map<std::string, std::vector<double>>& replicates, PsMode mode) {
  if (replicates.empty()) throw std::invalid_argument("score table is empty");
  const std::size_t count = replicates.begin()->second.size();
  for (const auto& [name, vals] : replicates) {
    if (vals.size() != count) throw std::invalid_argument("replicate counts differ across methods");
  }
  std::map<std::string, MethodScore> out;
  std::map<std::string, double> means;
  for (const auto& [name, vals] : replicates) means[name] = mean(vals);
  if (mode == PsMode::AverageThenScore) {
    const auto ps = performance_score(means);
    for (const auto& [name, v] : means) out[name] = {v, ps.at(name)};
    return out;
  }
  std::map<std::string, double> ps_sum;
  for (std::size_t r = 0; r < count; ++r) {
    std::map<std::string, double> row;
    for (const auto& [name, vals] : replicates) row[name] = vals[r];
    for (const auto& [name, ps] : performance_score(row)) ps_sum[name] += ps;
  }
  for (const auto& [name, v] : means) out[name] = {v, ps_sum[name] / static_cast<double>(count)};
  return out;
}

}  // namespace tebc
