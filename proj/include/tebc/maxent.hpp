#pragma once

// Builders for the entropy-compensating Maxent programs and the standard
// Maxent baseline, plus the experiment's constraint generators.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tebc/core.hpp"
#include "tebc/random.hpp"
#include "tebc/solver.hpp"
#include "tebc/teb.hpp"

namespace tebc {

/// sum_{i in indices} p_i equals `value` under the real distribution.
struct CertainConstraint {
  std::vector<std::size_t> indices;  // sorted, zero-based
  double value = 0.0;

  friend bool operator==(const CertainConstraint&, const CertainConstraint&) = default;
};

struct BoxSpec {
  double delta = 6e-4;
  /// Boxes go on bins with p-hat_i >= threshold_factor / m.
  double threshold_factor = 0.2;
  /// When boxes and certain constraints admit no common point, double delta
  /// until they do (recorded in MaxentFit::box_delta).
  bool widen_until_feasible = true;
};

enum class MaxentVariant { L22_TEBC, JSD_TEBC, ML_TEBC, L22_SEB, JSD_SEB, ML_SEB, SME };

inline std::string_view to_string(MaxentVariant v) {
  switch (v) {
    case MaxentVariant::L22_TEBC: return "l22-tebc";
    case MaxentVariant::JSD_TEBC: return "jsd-tebc";
    case MaxentVariant::ML_TEBC: return "ml-tebc";
    case MaxentVariant::L22_SEB: return "l22-seb";
    case MaxentVariant::JSD_SEB: return "jsd-seb";
    case MaxentVariant::ML_SEB: return "ml-seb";
    case MaxentVariant::SME: return "sme";
  }
  return "unknown";
}

inline bool is_tebc(MaxentVariant v) {
  return v == MaxentVariant::L22_TEBC || v == MaxentVariant::JSD_TEBC ||
         v == MaxentVariant::ML_TEBC;
}
inline bool is_seb(MaxentVariant v) {
  return v == MaxentVariant::L22_SEB || v == MaxentVariant::JSD_SEB || v == MaxentVariant::ML_SEB;
}

/// One box |p_i - p-hat_i| <= delta per bin with p-hat_i >= threshold_factor / m.
inline std::vector<BoxConstraint> generate_box_constraints(const CountSample& s, const BoxSpec& spec) {
  if (!(spec.delta > 0.0)) throw std::invalid_argument("box delta must be positive");
  const auto phat = s.to_distribution();
  const double th = spec.threshold_factor / static_cast<double>(s.bins());
  std::vector<BoxConstraint> boxes;
  for (std::size_t i = 0; i < phat.size(); ++i) {
    if (s[i] > 0 && phat[i] >= th) boxes.push_back({i, phat[i], spec.delta});
  }
  return boxes;
}

/// k distinct random partial-sum constraints consistent with `real`. Each
/// draws its size uniformly from [1, m-1] and then that many distinct
/// indices; an index set already drawn is redrawn.
inline std::vector<CertainConstraint> generate_certain_constraints(const Distribution& real,
                                                                   std::int64_t k,
                                                                   std::uint64_t seed) {
  if (k < 0) throw std::invalid_argument("constraint count must be nonnegative");
  const std::size_t m = real.size();
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> size_dist(1, m - 1);
  std::vector<std::size_t> pool(m);
  std::set<std::vector<std::size_t>> seen;
  std::vector<CertainConstraint> out;
  while (static_cast<std::int64_t>(out.size()) < k) {
    const std::size_t size = size_dist(rng);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t j = 0; j < size; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, m - 1);
      std::swap(pool[j], pool[pick(rng)]);
    }
    std::vector<std::size_t> idx(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(idx.begin(), idx.end());
    if (!seen.insert(idx).second) continue;
    double value = 0.0;
    for (auto i : idx) value += real[i];
    out.push_back({std::move(idx), value});
  }
  return out;
}

struct BuiltModel {
  ConvexProgram program;
  /// Entropy level asked for: H[p-hat] + delta (NaN for SME).
  double requested_level = std::numeric_limits<double>::quiet_NaN();
  /// Largest entropy the equalities allow (NaN for SME).
  double max_feasible = std::numeric_limits<double>::quiet_NaN();
  /// The requested level was unattainable and the floor was lowered to
  /// max_feasible - kClampMargin.
  bool clamped = false;
};

inline constexpr double kClampMargin = 1e-9;

/// Assembles the program for `variant`. TEBC variants need a Tsallis bias
/// estimate, SEB variants a Shannon one, and SME a BoxSpec.
inline BuiltModel build_model(const CountSample& s, MaxentVariant variant,
                              const std::optional<BiasEstimate>& bias,
                              const std::vector<CertainConstraint>& certain,
                              const std::optional<BoxSpec>& box, const SolverOptions& opt = {}) {
  const bool needs_bias = variant != MaxentVariant::SME;
  if (needs_bias != bias.has_value()) {
    throw std::invalid_argument(needs_bias ? "this Maxent variant needs a bias estimate"
                                           : "SME takes no bias estimate");
  }
  if (needs_bias == box.has_value()) {
    throw std::invalid_argument(needs_bias ? "only SME takes box constraints"
                                           : "SME needs a box specification");
  }
  if (bias && is_seb(variant) != bias->is_shannon()) {
    throw std::invalid_argument(is_seb(variant) ? "SEB variants need a Shannon bias estimate"
                                                : "TEBC variants need a Tsallis bias estimate");
  }

  BuiltModel built;
  ConvexProgram& prog = built.program;
  prog.dimension = s.bins();
  for (const auto& c : certain) {
    for (auto i : c.indices) {
      if (i >= s.bins()) throw std::invalid_argument("certain constraint index out of range");
    }
    prog.equalities.push_back({c.indices, c.value});
  }

  const auto phat = s.to_distribution();
  switch (variant) {
    case MaxentVariant::L22_TEBC:
    case MaxentVariant::L22_SEB: prog.objective = L22Distance{phat}; break;
    case MaxentVariant::JSD_TEBC:
    case MaxentVariant::JSD_SEB: prog.objective = JsdToTarget{phat}; break;
    case MaxentVariant::ML_TEBC:
    case MaxentVariant::ML_SEB: prog.objective = NegLogLikelihood{s}; break;
    case MaxentVariant::SME:
      prog.objective = NegShannonEntropy{};
      prog.boxes = generate_box_constraints(s, *box);
      return built;
  }

  const auto kind = is_seb(variant) ? EntropyKind::Shannon : EntropyKind::Tsallis;
  built.requested_level = entropy_value(kind, phat.probs()) + bias->delta;
  built.max_feasible = max_feasible_entropy(prog, kind, opt);
  double level = built.requested_level;
  if (level > built.max_feasible - kClampMargin) {
    level = built.max_feasible - kClampMargin;
    built.clamped = true;
  }
  prog.entropy_floor = EntropyFloor{kind, level};
  return built;
}

struct MaxentFit {
  Distribution distribution;
  SolveReport report;
  bool clamped = false;
  /// Box radius actually used by SME after any widening.
  std::optional<double> box_delta;
};

/// build_model + solve. Throws SolveError unless the solve is Optimal.
inline MaxentFit estimate_maxent(const CountSample& s, MaxentVariant variant,
                                 const std::optional<BiasEstimate>& bias,
                                 const std::vector<CertainConstraint>& certain,
                                 const std::optional<BoxSpec>& box,
                                 const SolverOptions& opt = {}) {
  auto built = build_model(s, variant, bias, certain, box, opt);
  std::optional<double> delta_used;
  auto report = solve(built.program, opt);
  if (variant == MaxentVariant::SME) {
    double delta = box->delta;
    while (report.status == SolveStatus::Infeasible && box->widen_until_feasible && delta < 1.0) {
      delta *= 2.0;
      for (auto& b : built.program.boxes) b.radius = delta;
      report = solve(built.program, opt);
    }
    delta_used = delta;
  }
  if (report.status != SolveStatus::Optimal) {
    throw SolveError(report.status, std::string(to_string(variant)) + ": " + report.message);
  }
  return {*report.solution, report, built.clamped, delta_used};
}

}  // namespace tebc
