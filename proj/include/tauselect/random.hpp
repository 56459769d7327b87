// Copyright 2026 The tauselect Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TAUSELECT_RANDOM_HPP_
#define TAUSELECT_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tauselect/common.hpp"

namespace tauselect {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Stateful draw source. The engine (mt19937_64) and every distribution here
/// are fully specified, so a given seed yields the same sequence on any
/// platform. Distributions are hand-rolled because the std:: ones are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, n); unbiased (Lemire's multiply-shift rejection).
  std::uint64_t uniform_index(std::uint64_t n) {
    check_arg(n > 0, "uniform_index: n must be positive");
    const std::uint64_t threshold = (-n) % n;
    for (;;) {
      const std::uint64_t x = next_u64();
      const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
      if (static_cast<std::uint64_t>(m) >= threshold) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Identity of a deterministic random stream: a master seed plus a
/// hierarchical path (experiment -> scenario -> replication -> purpose).
/// Identical (seed, path) always produces identical draws; distinct paths
/// are mixed through splitmix64 so parallel consumers never share state.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), path_hash_(splitmix64(seed)) {}

  RandomStream child(std::string_view name) const {
    RandomStream s(*this);
    s.path_hash_ = splitmix64(s.path_hash_ ^ fnv1a64(name));
    s.path_.emplace_back(name);
    return s;
  }

  RandomStream child(std::uint64_t index) const {
    RandomStream s(*this);
    s.path_hash_ = splitmix64(s.path_hash_ ^ splitmix64(index));
    s.path_.push_back(std::to_string(index));
    return s;
  }

  RandomStream child(int index) const { return child(static_cast<std::uint64_t>(index)); }

  Rng engine() const { return Rng(path_hash_); }

  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& path() const { return path_; }

 private:
  std::uint64_t seed_;
  std::uint64_t path_hash_;
  std::vector<std::string> path_;
};

}  // namespace tauselect

#endif  // TAUSELECT_RANDOM_HPP_
