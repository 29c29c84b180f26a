#pragma once

// Text forms: Distribution <-> {"p": [...]}, count files, and JSON views of
// bias estimates and solver reports.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tebc/core.hpp"
#include "tebc/solver.hpp"
#include "tebc/teb.hpp"

namespace tebc {

using nlohmann::json;

/// JSON cannot carry inf/nan; they are written as strings.
inline json number_or_string(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json to_json(const Distribution& d) { return json{{"p", d.vector()}}; }

inline Distribution distribution_from_json(const json& j) {
  if (!j.is_object() || !j.contains("p") || j.size() != 1) {
    throw std::invalid_argument("distribution JSON must be an object with the single key \"p\"");
  }
  return Distribution(j.at("p").get<std::vector<double>>());
}

inline json to_json(const BiasEstimate& b) {
  json j{{"kind", std::string(to_string(b.kind))}, {"delta", b.delta}};
  j["khat"] = b.slope_khat ? json(*b.slope_khat) : json(nullptr);
  if (b.std_error) j["std_error"] = *b.std_error;
  if (b.kind == BiasKind::FrequentistBootstrap) j["clamped"] = b.clamped;
  return j;
}

inline json to_json(const SolveReport& r) {
  json j{{"status", std::string(to_string(r.status))},
         {"message", r.message},
         {"objective_value", number_or_string(r.objective_value)},
         {"max_equality_residual", number_or_string(r.max_equality_residual)},
         {"max_inequality_violation", number_or_string(r.max_inequality_violation)},
         {"entropy_floor_slack", number_or_string(r.entropy_floor_slack)},
         {"stationarity", number_or_string(r.stationarity)},
         {"duality_gap", number_or_string(r.duality_gap)},
         {"iterations", r.iterations}};
  if (r.solution) j["solution"] = r.solution->vector();
  return j;
}

/// Nonnegative integers separated by newlines, commas, or whitespace.
inline std::vector<std::int64_t> parse_counts(const std::string& text) {
  std::vector<std::int64_t> counts;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(token, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not an integer count: '" + token + "'");
    }
    if (used != token.size()) throw std::invalid_argument("not an integer count: '" + token + "'");
    if (v < 0) throw std::invalid_argument("negative count: " + token);
    counts.push_back(v);
    token.clear();
  };
  for (char ch : text) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == ' ' || ch == '\t') {
      flush();
    } else {
      token.push_back(ch);
    }
  }
  flush();
  return counts;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::int64_t> read_counts_file(const std::string& path) {
  auto counts = parse_counts(read_text_file(path));
  if (counts.empty()) throw std::runtime_error("counts file " + path + " is empty");
  return counts;
}

}  // namespace tebc
