#pragma once

// Seed derivation and the few samplers the toolkit needs. Every random
// consumer owns a std::mt19937_64 seeded from derive_seed(), so streams for
// different (source, replicate, role) keys never overlap or interfere.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "tebc/core.hpp"

namespace tebc {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Hashes a base seed together with an ordered list of stream keys.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                           std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(seed);
  for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

/// Uniform draw on the simplex (flat Dirichlet) via normalized unit exponentials.
inline Distribution draw_uniform_simplex(std::size_t m, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(m);
  for (auto& v : w) {
    do {
      v = expo(rng);
    } while (!(v > 0.0));
  }
  return Distribution::normalize(std::move(w));
}

/// One multinomial draw of size n, by sequential conditional binomials.
inline CountSample draw_multinomial(const Distribution& p, std::int64_t n, Rng& rng) {
  std::vector<std::int64_t> counts(p.size(), 0);
  std::int64_t remaining = n;
  double mass_left = 1.0;
  for (std::size_t i = 0; i + 1 < p.size() && remaining > 0; ++i) {
    if (p[i] <= 0.0) continue;
    double prob = mass_left > 0.0 ? p[i] / mass_left : 1.0;
    if (prob >= 1.0) {
      counts[i] = remaining;
      remaining = 0;
      break;
    }
    std::binomial_distribution<std::int64_t> binom(remaining, prob);
    counts[i] = binom(rng);
    remaining -= counts[i];
    mass_left -= p[i];
  }
  if (remaining > 0) {
    // Whatever is left belongs to the last bin with positive mass.
    std::size_t last = p.size() - 1;
    while (last > 0 && p[last] <= 0.0) --last;
    counts[last] += remaining;
  }
  return CountSample(std::move(counts));
}

}  // namespace tebc
