#pragma once

// Experiment harness: source distributions, real-data ingestion, the
// method registry, and the benchmark loop that produces score tables.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tebc/core.hpp"
#include "tebc/eval.hpp"
#include "tebc/io.hpp"
#include "tebc/maxent.hpp"
#include "tebc/random.hpp"
#include "tebc/smoothing.hpp"
#include "tebc/teb.hpp"

namespace tebc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Sources

struct Uniform01 {};
struct AbsStdNormal {};
struct NormalSource {
  double mean = 0.0;
  double std = 1.0;
};
struct ChiSquareSource {
  double df = 1.0;
};
struct BinomialSource {
  std::int64_t trials = 1;
  double prob = 0.5;
};
struct BetaSource {
  double a = 1.0;
  double b = 1.0;
};
struct FileCounts {
  std::string path;
};
struct FileFeatureBinned {
  std::string path;
  std::size_t column = 0;
  std::int64_t bins = 2;
};

using SourceKind = std::variant<Uniform01, AbsStdNormal, NormalSource, ChiSquareSource,
                                BinomialSource, BetaSource, FileCounts, FileFeatureBinned>;

struct SourceSpec {
  SourceKind kind;
  std::string name;
};

inline bool is_file_source(const SourceKind& k) {
  return std::holds_alternative<FileCounts>(k) || std::holds_alternative<FileFeatureBinned>(k);
}

namespace detail {
inline std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}
}  // namespace detail

inline std::string default_source_name(const SourceKind& kind) {
  using detail::short_number;
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Uniform01>) {
          return "uniform01";
        } else if constexpr (std::is_same_v<T, AbsStdNormal>) {
          return "abs_std_normal";
        } else if constexpr (std::is_same_v<T, NormalSource>) {
          return "normal_" + short_number(k.mean) + "_" + short_number(k.std);
        } else if constexpr (std::is_same_v<T, ChiSquareSource>) {
          return "chi_square_" + short_number(k.df);
        } else if constexpr (std::is_same_v<T, BinomialSource>) {
          return "binomial_" + std::to_string(k.trials) + "_" + short_number(k.prob);
        } else if constexpr (std::is_same_v<T, BetaSource>) {
          return "beta_" + short_number(k.a) + "_" + short_number(k.b);
        } else if constexpr (std::is_same_v<T, FileCounts>) {
          return std::filesystem::path(k.path).stem().string();
        } else {
          return std::filesystem::path(k.path).stem().string() + "_col" + std::to_string(k.column);
        }
      },
      kind);
}

inline void validate_source(const SourceKind& kind) {
  std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, NormalSource>) {
          if (!(k.std > 0.0)) throw ConfigError("normal source needs std > 0");
        } else if constexpr (std::is_same_v<T, ChiSquareSource>) {
          if (!(k.df > 0.0)) throw ConfigError("chi-square source needs df > 0");
        } else if constexpr (std::is_same_v<T, BinomialSource>) {
          if (k.trials < 1) throw ConfigError("binomial source needs trials >= 1");
          if (!(k.prob > 0.0 && k.prob < 1.0)) throw ConfigError("binomial source needs 0 < prob < 1");
        } else if constexpr (std::is_same_v<T, BetaSource>) {
          if (!(k.a > 0.0 && k.b > 0.0)) throw ConfigError("beta source needs a, b > 0");
        } else if constexpr (std::is_same_v<T, FileCounts>) {
          if (k.path.empty()) throw ConfigError("file_counts source needs a path");
        } else if constexpr (std::is_same_v<T, FileFeatureBinned>) {
          if (k.path.empty()) throw ConfigError("file_feature_binned source needs a path");
          if (k.bins < 2) throw ConfigError("file_feature_binned source needs bins >= 2");
        }
      },
      kind);
}

/// m strictly positive draws from a synthetic source, before normalization.
/// Families that can produce values <= 0 are folded by absolute value, and
/// exact zeros are redrawn.
inline std::vector<double> draw_source_values(const SourceKind& kind, std::size_t m, Rng& rng) {
  validate_source(kind);
  std::function<double()> draw = std::visit(
      [&rng](const auto& k) -> std::function<double()> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Uniform01>) {
          return [&rng] { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); };
        } else if constexpr (std::is_same_v<T, AbsStdNormal>) {
          return [&rng] { return std::abs(std::normal_distribution<double>(0.0, 1.0)(rng)); };
        } else if constexpr (std::is_same_v<T, NormalSource>) {
          return [&rng, k] { return std::abs(std::normal_distribution<double>(k.mean, k.std)(rng)); };
        } else if constexpr (std::is_same_v<T, ChiSquareSource>) {
          return [&rng, k] { return std::chi_squared_distribution<double>(k.df)(rng); };
        } else if constexpr (std::is_same_v<T, BinomialSource>) {
          return [&rng, k] {
            return static_cast<double>(std::binomial_distribution<std::int64_t>(k.trials, k.prob)(rng));
          };
        } else if constexpr (std::is_same_v<T, BetaSource>) {
          return [&rng, k] {
            const double x = std::gamma_distribution<double>(k.a, 1.0)(rng);
            const double y = std::gamma_distribution<double>(k.b, 1.0)(rng);
            return x / (x + y);
          };
        } else {
          throw ConfigError("file sources have no synthetic draws");
        }
      },
      kind);
  std::vector<double> values(m);
  for (auto& v : values) {
    do {
      v = draw();
    } while (!(v > 0.0) || !std::isfinite(v));
  }
  return values;
}

/// Reads counts, or bins a numeric CSV column into equal-width intervals.
/// Every bin must be populated.
struct IngestedSource {
  Distribution real;
  std::vector<std::int64_t> counts;

  CountSample draw(std::int64_t n, std::uint64_t seed) const {
    Rng rng(seed);
    return draw_multinomial(real, n, rng);
  }
};

namespace detail {
inline IngestedSource from_counts(std::vector<std::int64_t> counts) {
  if (counts.size() < 2) throw std::runtime_error("need at least 2 bins, got " + std::to_string(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) {
      throw std::runtime_error("zero-count bin " + std::to_string(i + 1) +
                               "; use fewer bins to avoid a degenerate distribution");
    }
  }
  std::vector<double> w(counts.begin(), counts.end());
  return {Distribution::normalize(std::move(w)), std::move(counts)};
}
}  // namespace detail

inline IngestedSource ingest_counts(const FileCounts& spec) {
  return detail::from_counts(read_counts_file(spec.path));
}

/// Equal-width binning over [min, max]; the maximum lands in the last bin.
inline std::vector<std::int64_t> bin_values(const std::vector<double>& values, std::int64_t bins) {
  if (values.empty()) throw std::runtime_error("no values to bin");
  if (bins < 2) throw std::invalid_argument("need at least 2 bins");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw std::runtime_error("feature is constant; cannot bin");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    auto b = static_cast<std::int64_t>(std::floor((v - lo) / (hi - lo) * static_cast<double>(bins)));
    ++counts[static_cast<std::size_t>(std::clamp<std::int64_t>(b, 0, bins - 1))];
  }
  return counts;
}

inline std::vector<double> read_numeric_column(const std::string& path, std::size_t column) {
  std::istringstream in(read_text_file(path));
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (column >= fields.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": no column " +
                               std::to_string(column));
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(fields[column], &used);
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
      values.push_back(v);
    } catch (const std::exception&) {
      if (values.empty() && line_no == 1) continue;  // header
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": non-numeric value '" +
                               fields[column] + "'");
    }
  }
  if (values.empty()) throw std::runtime_error(path + " has no numeric rows");
  return values;
}

inline IngestedSource ingest_counts(const FileFeatureBinned& spec) {
  return detail::from_counts(bin_values(read_numeric_column(spec.path, spec.column), spec.bins));
}

/// Draws m values from a synthetic source and normalizes them.
inline Distribution gen_real_distribution(const SourceSpec& spec, std::int64_t m, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("bin count m must be at least 2");
  if (const auto* f = std::get_if<FileCounts>(&spec.kind)) return ingest_counts(*f).real;
  if (const auto* f = std::get_if<FileFeatureBinned>(&spec.kind)) return ingest_counts(*f).real;
  Rng rng(seed);
  return Distribution::normalize(draw_source_values(spec.kind, static_cast<std::size_t>(m), rng));
}

inline CountSample sample_counts(const Distribution& real, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample size n must be at least 1");
  Rng rng(seed);
  return draw_multinomial(real, n, rng);
}

// ---------------------------------------------------------------------------
// Methods

enum class Track { Maxent, Smoothing };

inline std::string_view to_string(Track t) { return t == Track::Maxent ? "maxent" : "smoothing"; }

enum class BiasChoice { Naive, Bootstrap, Bayes, Seb };

inline BiasChoice parse_bias_choice(std::string_view s) {
  if (s == "naive") return BiasChoice::Naive;
  if (s == "bootstrap") return BiasChoice::Bootstrap;
  if (s == "bayes") return BiasChoice::Bayes;
  if (s == "seb") return BiasChoice::Seb;
  throw ConfigError("unknown bias '" + std::string(s) + "' (naive|bootstrap|bayes|seb)");
}

inline BiasEstimate compute_bias(BiasChoice choice, const CountSample& s, std::uint64_t seed) {
  const auto m = static_cast<std::int64_t>(s.bins());
  switch (choice) {
    case BiasChoice::Naive: return frequentist_teb_naive(s);
    case BiasChoice::Bootstrap:
      return frequentist_teb_bootstrap(s, BootstrapConfig::defaults(s.n(), seed));
    case BiasChoice::Bayes: return bayesian_teb(m, s.n());
    case BiasChoice::Seb: return seb(m, s.n());
  }
  throw std::logic_error("unhandled bias choice");
}

enum class MethodFamily { Sample, Named, TebLidstone, SebLidstone, SimplestGT, SGT, Maxent };

struct MethodSpec {
  std::string name;
  MethodFamily family = MethodFamily::Sample;
  NamedLidstone named = NamedLidstone::Laplace;
  std::optional<MaxentVariant> variant;
  std::optional<BiasChoice> bias;
};

/// Recognized names:
///   sample, laplace, ele, addtiny, f-lidstone, b-lidstone, fb-lidstone,
///   teb-lidstone, seb-lidstone, simplest-gt, sgt,
///   [f-|b-|fb-]{l22,jsd,ml}-tebc, {l22,jsd,ml}-seb, sme.
/// The f- / b- / fb- prefixes pick naive, Bayesian, or bootstrap TEB; the
/// bare teb-lidstone and *-tebc names take their bias from the caller.
inline MethodSpec parse_method(const std::string& name) {
  MethodSpec spec;
  spec.name = name;
  if (name == "sample") return spec;
  if (name == "laplace" || name == "ele" || name == "addtiny") {
    spec.family = MethodFamily::Named;
    spec.named = name == "laplace" ? NamedLidstone::Laplace
                 : name == "ele"   ? NamedLidstone::ELE
                                   : NamedLidstone::AddTiny;
    return spec;
  }
  if (name == "simplest-gt") {
    spec.family = MethodFamily::SimplestGT;
    return spec;
  }
  if (name == "sgt") {
    spec.family = MethodFamily::SGT;
    return spec;
  }
  if (name == "seb-lidstone") {
    spec.family = MethodFamily::SebLidstone;
    spec.bias = BiasChoice::Seb;
    return spec;
  }
  if (name == "sme") {
    spec.family = MethodFamily::Maxent;
    spec.variant = MaxentVariant::SME;
    return spec;
  }

  std::string rest = name;
  std::optional<BiasChoice> prefix;
  if (rest.rfind("fb-", 0) == 0) {
    prefix = BiasChoice::Bootstrap;
    rest = rest.substr(3);
  } else if (rest.rfind("f-", 0) == 0) {
    prefix = BiasChoice::Naive;
    rest = rest.substr(2);
  } else if (rest.rfind("b-", 0) == 0) {
    prefix = BiasChoice::Bayes;
    rest = rest.substr(2);
  }
  if (rest == "lidstone" && prefix) {
    spec.family = MethodFamily::TebLidstone;
    spec.bias = prefix;
    return spec;
  }
  if (rest == "teb-lidstone" && !prefix) {
    spec.family = MethodFamily::TebLidstone;
    return spec;
  }
  static const std::map<std::string, MaxentVariant> tebc{{"l22-tebc", MaxentVariant::L22_TEBC},
                                                         {"jsd-tebc", MaxentVariant::JSD_TEBC},
                                                         {"ml-tebc", MaxentVariant::ML_TEBC}};
  static const std::map<std::string, MaxentVariant> sebs{{"l22-seb", MaxentVariant::L22_SEB},
                                                         {"jsd-seb", MaxentVariant::JSD_SEB},
                                                         {"ml-seb", MaxentVariant::ML_SEB}};
  if (auto it = tebc.find(rest); it != tebc.end()) {
    spec.family = MethodFamily::Maxent;
    spec.variant = it->second;
    spec.bias = prefix;
    return spec;
  }
  if (auto it = sebs.find(rest); it != sebs.end() && !prefix) {
    spec.family = MethodFamily::Maxent;
    spec.variant = it->second;
    spec.bias = BiasChoice::Seb;
    return spec;
  }
  throw ConfigError("unknown method '" + name + "'");
}

/// Whether the benchmark track can run the method ("sample" belongs to both).
inline bool method_in_track(const MethodSpec& spec, Track track) {
  if (spec.family == MethodFamily::Sample) return true;
  return (spec.family == MethodFamily::Maxent) == (track == Track::Maxent);
}

inline std::vector<std::string> default_methods(Track track) {
  if (track == Track::Smoothing) {
    return {"sample", "laplace", "ele", "addtiny", "f-lidstone",
            "b-lidstone", "seb-lidstone", "simplest-gt", "sgt"};
  }
  return {"sample",   "f-l22-tebc", "f-jsd-tebc", "f-ml-tebc", "b-l22-tebc", "b-jsd-tebc",
          "b-ml-tebc", "l22-seb",    "jsd-seb",    "ml-seb",    "sme"};
}

struct MethodContext {
  std::vector<CertainConstraint> certain;
  BoxSpec box;
  SolverOptions solver;
  /// Seed for methods with internal randomness (bootstrap TEB).
  std::uint64_t seed = 0;
};

struct MethodResult {
  Distribution estimate;
  std::optional<BiasEstimate> bias;
  std::optional<LidstoneFit> lidstone_fit;
  std::optional<MaxentFit> maxent_fit;
};

/// Runs one method on one sample. `bias_override` replaces the method's
/// bias choice (and is required for teb-lidstone and unprefixed *-tebc).
inline MethodResult run_method(const MethodSpec& spec, const CountSample& s, const MethodContext& ctx,
                               std::optional<BiasChoice> bias_override = std::nullopt) {
  std::optional<BiasChoice> choice = bias_override ? bias_override : spec.bias;
  const bool takes_bias = spec.family == MethodFamily::TebLidstone ||
                          spec.family == MethodFamily::SebLidstone ||
                          (spec.family == MethodFamily::Maxent && spec.variant != MaxentVariant::SME);
  if (!takes_bias && bias_override) throw ConfigError("method '" + spec.name + "' takes no bias");
  if (takes_bias && !choice) throw ConfigError("method '" + spec.name + "' needs --bias");
  if (takes_bias) {
    const bool wants_shannon = spec.family == MethodFamily::SebLidstone ||
                               (spec.variant && is_seb(*spec.variant));
    if (wants_shannon != (*choice == BiasChoice::Seb)) {
      throw ConfigError("method '" + spec.name + "' cannot use that bias");
    }
  }

  MethodResult out;
  if (takes_bias) out.bias = compute_bias(*choice, s, derive_seed(ctx.seed, {0x626f6f74ULL}));
  switch (spec.family) {
    case MethodFamily::Sample: out.estimate = s.to_distribution(); break;
    case MethodFamily::Named: out.estimate = named_lidstone(s, spec.named); break;
    case MethodFamily::TebLidstone:
      out.lidstone_fit = solve_teb_lidstone_f(s, *out.bias);
      out.estimate = lidstone(s, out.lidstone_fit->f);
      break;
    case MethodFamily::SebLidstone:
      out.lidstone_fit = solve_seb_lidstone_f(s, *out.bias);
      out.estimate = lidstone(s, out.lidstone_fit->f);
      break;
    case MethodFamily::SimplestGT: out.estimate = good_turing_simplest(s); break;
    case MethodFamily::SGT: out.estimate = simple_good_turing(s); break;
    case MethodFamily::Maxent: {
      std::optional<BoxSpec> box;
      if (spec.variant == MaxentVariant::SME) box = ctx.box;
      out.maxent_fit = estimate_maxent(s, *spec.variant, out.bias, ctx.certain, box, ctx.solver);
      out.estimate = out.maxent_fit->distribution;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

struct ExperimentConfig {
  std::vector<SourceSpec> sources;
  std::int64_t m = 100;
  std::int64_t n = 1000;
  std::int64_t r = 10;
  std::int64_t s = 20;
  std::int64_t k = 20;
  double delta = 6e-4;
  double threshold_factor = 0.2;
  std::vector<std::string> methods;
  std::uint64_t seed = 0;
  PsMode ps_mode = PsMode::AverageThenScore;
};

inline std::vector<SourceSpec> default_sources() {
  std::vector<SourceSpec> out;
  for (SourceKind k : std::vector<SourceKind>{Uniform01{}, AbsStdNormal{}, NormalSource{3.0, 1.0},
                                              ChiSquareSource{10.0}, BinomialSource{30, 0.2},
                                              BetaSource{3.0, 6.0}}) {
    out.push_back({k, default_source_name(k)});
  }
  return out;
}

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed,
                           const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown field '" + key + "' in " + where);
    }
  }
}

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + " needs field '" + key + "'");
  return field<T>(j, key, T{});
}

}  // namespace detail

inline SourceSpec parse_source(const json& j) {
  using detail::field;
  using detail::reject_unknown;
  using detail::required;
  if (!j.is_object()) throw ConfigError("source must be a JSON object");
  const auto kind = required<std::string>(j, "kind", "source");
  SourceKind k;
  if (kind == "uniform01") {
    reject_unknown(j, {"kind", "name"}, "uniform01 source");
    k = Uniform01{};
  } else if (kind == "abs_std_normal") {
    reject_unknown(j, {"kind", "name"}, "abs_std_normal source");
    k = AbsStdNormal{};
  } else if (kind == "normal") {
    reject_unknown(j, {"kind", "name", "mean", "std"}, "normal source");
    k = NormalSource{field(j, "mean", 0.0), field(j, "std", 1.0)};
  } else if (kind == "chi_square") {
    reject_unknown(j, {"kind", "name", "df"}, "chi_square source");
    k = ChiSquareSource{required<double>(j, "df", "chi_square source")};
  } else if (kind == "binomial") {
    reject_unknown(j, {"kind", "name", "trials", "prob"}, "binomial source");
    k = BinomialSource{required<std::int64_t>(j, "trials", "binomial source"),
                       required<double>(j, "prob", "binomial source")};
  } else if (kind == "beta") {
    reject_unknown(j, {"kind", "name", "a", "b"}, "beta source");
    k = BetaSource{required<double>(j, "a", "beta source"), required<double>(j, "b", "beta source")};
  } else if (kind == "file_counts") {
    reject_unknown(j, {"kind", "name", "path"}, "file_counts source");
    k = FileCounts{required<std::string>(j, "path", "file_counts source")};
  } else if (kind == "file_feature_binned") {
    reject_unknown(j, {"kind", "name", "path", "column", "bins"}, "file_feature_binned source");
    k = FileFeatureBinned{required<std::string>(j, "path", "file_feature_binned source"),
                          field<std::size_t>(j, "column", 0),
                          required<std::int64_t>(j, "bins", "file_feature_binned source")};
  } else {
    throw ConfigError("unknown source kind '" + kind + "'");
  }
  validate_source(k);
  return {k, field<std::string>(j, "name", default_source_name(k))};
}

inline json to_json(const SourceSpec& spec) {
  json j = std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Uniform01>) {
          return {{"kind", "uniform01"}};
        } else if constexpr (std::is_same_v<T, AbsStdNormal>) {
          return {{"kind", "abs_std_normal"}};
        } else if constexpr (std::is_same_v<T, NormalSource>) {
          return {{"kind", "normal"}, {"mean", k.mean}, {"std", k.std}};
        } else if constexpr (std::is_same_v<T, ChiSquareSource>) {
          return {{"kind", "chi_square"}, {"df", k.df}};
        } else if constexpr (std::is_same_v<T, BinomialSource>) {
          return {{"kind", "binomial"}, {"trials", k.trials}, {"prob", k.prob}};
        } else if constexpr (std::is_same_v<T, BetaSource>) {
          return {{"kind", "beta"}, {"a", k.a}, {"b", k.b}};
        } else if constexpr (std::is_same_v<T, FileCounts>) {
          return {{"kind", "file_counts"}, {"path", k.path}};
        } else {
          return {{"kind", "file_feature_binned"}, {"path", k.path}, {"column", k.column},
                  {"bins", k.bins}};
        }
      },
      spec.kind);
  j["name"] = spec.name;
  return j;
}

/// Parses an experiment config. Missing fields take the defaults m = 100,
/// n = 10 m, r = 10, s = 20, k = round(0.2 m), delta = 6e-4,
/// threshold_factor = 0.2, the six synthetic sources, and the track's full
/// method list. Unknown fields are rejected.
inline ExperimentConfig parse_config(const json& j, Track track) {
  using detail::field;
  detail::reject_unknown(j, {"sources", "m", "n", "r", "s", "k", "delta", "threshold_factor",
                             "methods", "seed", "ps_mode"},
                         "experiment config");
  ExperimentConfig cfg;
  cfg.m = field<std::int64_t>(j, "m", 100);
  cfg.n = field<std::int64_t>(j, "n", 10 * cfg.m);
  cfg.r = field<std::int64_t>(j, "r", 10);
  cfg.s = field<std::int64_t>(j, "s", 20);
  cfg.k = field<std::int64_t>(j, "k", std::llround(0.2 * static_cast<double>(cfg.m)));
  cfg.delta = field<double>(j, "delta", 6e-4);
  cfg.threshold_factor = field<double>(j, "threshold_factor", 0.2);
  cfg.seed = field<std::uint64_t>(j, "seed", 0);
  const auto mode = field<std::string>(j, "ps_mode", "average_then_score");
  if (mode == "average_then_score") {
    cfg.ps_mode = PsMode::AverageThenScore;
  } else if (mode == "score_then_average") {
    cfg.ps_mode = PsMode::ScoreThenAverage;
  } else {
    throw ConfigError("ps_mode must be average_then_score or score_then_average");
  }
  if (j.contains("sources")) {
    if (!j.at("sources").is_array()) throw ConfigError("sources must be an array");
    for (const auto& sj : j.at("sources")) cfg.sources.push_back(parse_source(sj));
  } else {
    cfg.sources = default_sources();
  }
  cfg.methods = field<std::vector<std::string>>(j, "methods", default_methods(track));

  if (cfg.m < 2) throw ConfigError("m must be at least 2");
  if (cfg.n < 2) throw ConfigError("n must be at least 2");
  if (cfg.r < 1 || cfg.s < 1) throw ConfigError("r and s must be at least 1");
  if (cfg.k < 0) throw ConfigError("k must be nonnegative");
  if (!(cfg.delta > 0.0)) throw ConfigError("delta must be positive");
  if (!(cfg.threshold_factor >= 0.0)) throw ConfigError("threshold_factor must be nonnegative");
  if (cfg.sources.empty()) throw ConfigError("at least one source is required");
  if (cfg.methods.empty()) throw ConfigError("at least one method is required");
  std::set<std::string> names;
  for (const auto& name : cfg.methods) {
    const auto spec = parse_method(name);
    if (!method_in_track(spec, track)) {
      throw ConfigError("method '" + name + "' does not belong to the " +
                        std::string(to_string(track)) + " benchmark");
    }
    if (spec.family == MethodFamily::TebLidstone && !spec.bias) {
      throw ConfigError("method '" + name + "' needs a bias prefix (f-, b-, fb-) in a benchmark");
    }
    if (spec.variant && is_tebc(*spec.variant) && !spec.bias) {
      throw ConfigError("method '" + name + "' needs a bias prefix (f-, b-, fb-) in a benchmark");
    }
    if (!names.insert(name).second) throw ConfigError("duplicate method '" + name + "'");
  }
  std::set<std::string> source_names;
  for (const auto& src : cfg.sources) {
    if (!source_names.insert(src.name).second) {
      throw ConfigError("duplicate source name '" + src.name + "'");
    }
  }
  return cfg;
}

inline json to_json(const ExperimentConfig& cfg) {
  json sources = json::array();
  for (const auto& s : cfg.sources) sources.push_back(to_json(s));
  return {{"sources", sources},
          {"m", cfg.m},
          {"n", cfg.n},
          {"r", cfg.r},
          {"s", cfg.s},
          {"k", cfg.k},
          {"delta", cfg.delta},
          {"threshold_factor", cfg.threshold_factor},
          {"methods", cfg.methods},
          {"seed", cfg.seed},
          {"ps_mode", cfg.ps_mode == PsMode::AverageThenScore ? "average_then_score"
                                                              : "score_then_average"}};
}

/// FNV-1a over the canonical JSON dump.
inline std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(cfg).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Benchmark

struct CellResult {
  std::string dataset;
  std::string method;
  Criterion criterion = Criterion::JsDivergence;
  std::vector<double> values;
  double mean_value = std::numeric_limits<double>::quiet_NaN();
  double performance_score = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::string> error;
};

struct BenchmarkReport {
  Track track = Track::Smoothing;
  ExperimentConfig config;
  std::vector<CellResult> cells;
  std::string config_hash;
  double wall_seconds = 0.0;
  /// Diagnostics per (dataset, method): solves whose entropy floor was
  /// clamped, and the largest SME box radius used after widening.
  std::map<std::pair<std::string, std::string>, std::int64_t> clamped_solves;
  std::map<std::pair<std::string, std::string>, double> max_box_delta;

  const CellResult* find(const std::string& dataset, const std::string& method, Criterion c) const {
    for (const auto& cell : cells) {
      if (cell.dataset == dataset && cell.method == method && cell.criterion == c) return &cell;
    }
    return nullptr;
  }
};

namespace detail {
enum StreamRole : std::uint64_t { kRoleReal = 1, kRoleCertain = 2, kRoleSample = 3, kRoleMethod = 4 };
}

/// Runs every configured method on r x s sampling distributions per source
/// and scores both criteria. Method failures mark their cell and the run
/// continues.
inline BenchmarkReport run_benchmark(const ExperimentConfig& cfg, Track track) {
  using namespace detail;
  const auto start = std::chrono::steady_clock::now();
  BenchmarkReport report;
  report.track = track;
  report.config = cfg;
  report.config_hash = config_hash(cfg);

  std::vector<MethodSpec> methods;
  for (const auto& name : cfg.methods) methods.push_back(parse_method(name));
  const std::array<Criterion, 2> criteria{Criterion::JsDivergence, Criterion::ExpectedLogLoss};

  for (std::size_t src = 0; src < cfg.sources.size(); ++src) {
    const auto& source = cfg.sources[src];
    std::optional<IngestedSource> ingested;
    if (const auto* f = std::get_if<FileCounts>(&source.kind)) ingested = ingest_counts(*f);
    if (const auto* f = std::get_if<FileFeatureBinned>(&source.kind)) ingested = ingest_counts(*f);

    // values[method][criterion] in replicate order.
    std::vector<std::array<std::vector<double>, 2>> values(methods.size());
    std::vector<std::optional<std::string>> errors(methods.size());

    for (std::int64_t rep = 0; rep < cfg.r; ++rep) {
      const auto urep = static_cast<std::uint64_t>(rep);
      const Distribution real =
          ingested ? ingested->real
                   : gen_real_distribution(source, cfg.m, derive_seed(cfg.seed, {src, urep, kRoleReal}));
      MethodContext ctx;
      ctx.box = BoxSpec{cfg.delta, cfg.threshold_factor, true};
      if (track == Track::Maxent) {
        ctx.certain = generate_certain_constraints(real, cfg.k, derive_seed(cfg.seed, {src, urep, kRoleCertain}));
      }
      for (std::int64_t j = 0; j < cfg.s; ++j) {
        const auto uj = static_cast<std::uint64_t>(j);
        const auto sample = sample_counts(real, cfg.n, derive_seed(cfg.seed, {src, urep, uj, kRoleSample}));
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
          if (errors[mi]) continue;
          ctx.seed = derive_seed(cfg.seed, {src, urep, uj, kRoleMethod, mi});
          try {
            const auto result = run_method(methods[mi], sample, ctx);
            for (std::size_t c = 0; c < criteria.size(); ++c) {
              values[mi][c].push_back(criterion_value(criteria[c], real, result.estimate, cfg.n));
            }
            if (result.maxent_fit) {
              const auto key = std::make_pair(source.name, methods[mi].name);
              if (result.maxent_fit->clamped) ++report.clamped_solves[key];
              if (result.maxent_fit->box_delta) {
                auto& d = report.max_box_delta[key];
                d = std::max(d, *result.maxent_fit->box_delta);
              }
            }
          } catch (const std::exception& e) {
            errors[mi] = "replicate " + std::to_string(rep) + "/" + std::to_string(j) + ": " + e.what();
          }
        }
      }
    }

    for (std::size_t c = 0; c < criteria.size(); ++c) {
      std::map<std::string, std::vector<double>> table;
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        if (!errors[mi]) table[methods[mi].name] = values[mi][c];
      }
      std::map<std::string, MethodScore> scores;
      if (!table.empty()) scores = score_table(table, cfg.ps_mode);
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        CellResult cell;
        cell.dataset = source.name;
        cell.method = methods[mi].name;
        cell.criterion = criteria[c];
        if (errors[mi]) {
          cell.error = errors[mi];
        } else {
          cell.values = values[mi][c];
          cell.mean_value = scores.at(cell.method).mean_value;
          cell.performance_score = scores.at(cell.method).performance_score;
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

namespace detail {
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}
}  // namespace detail

inline constexpr std::string_view kReportCsvHeader =
    "dataset,method,criterion,mean_value,performance_score";

/// Rows in config order (source, then criterion, then method). Contains no
/// timing data, so identical runs give identical bytes.
inline std::string to_csv(const BenchmarkReport& report) {
  std::string out(kReportCsvHeader);
  out += '\n';
  for (const auto& c : report.cells) {
    out += detail::csv_field(c.dataset) + ',' + detail::csv_field(c.method) + ',' +
           std::string(to_string(c.criterion)) + ',' + detail::format_number(c.mean_value) + ',' +
           detail::format_number(c.performance_score) + '\n';
  }
  return out;
}

inline json to_json(const BenchmarkReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json values = json::array();
    for (double v : c.values) values.push_back(number_or_string(v));
    json cj{{"dataset", c.dataset},
            {"method", c.method},
            {"criterion", std::string(to_string(c.criterion))},
            {"mean_value", number_or_string(c.mean_value)},
            {"performance_score", number_or_string(c.performance_score)},
            {"replicates", values}};
    if (c.error) cj["error"] = *c.error;
    cells.push_back(cj);
  }
  json diag = json::array();
  for (const auto& [key, count] : report.clamped_solves) {
    diag.push_back({{"dataset", key.first}, {"method", key.second}, {"clamped_solves", count}});
  }
  json widen = json::array();
  for (const auto& [key, d] : report.max_box_delta) {
    widen.push_back({{"dataset", key.first}, {"method", key.second}, {"max_box_delta", d}});
  }
  return {{"track", std::string(to_string(report.track))},
          {"config", to_json(report.config)},
          {"metadata",
           {{"seed", report.config.seed},
            {"config_hash", report.config_hash},
            {"wall_seconds", report.wall_seconds}}},
          {"cells", cells},
          {"diagnostics", {{"clamped", diag}, {"sme_box_delta", widen}}}};
}

}  // namespace tebc
