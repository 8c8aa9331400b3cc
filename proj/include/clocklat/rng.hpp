#pragma once

// Counter-based random streams. A stream is keyed by a seed plus a tuple of
// counters (chain, sweep, move, ...), so draws never depend on the order in
// which independent streams are consumed or on the number of threads.

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace clocklat {

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_string(std::string_view text);

/// Derives a child seed from a parent seed and a component name.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view component);

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::initializer_list<std::uint64_t> counters);

  std::uint64_t next();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Uniform double in [0, 1).
  double uniform();

 private:
  std::uint64_t key_;
  std::uint64_t draw_ = 0;
};

}  // namespace clocklat
