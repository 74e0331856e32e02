#pragma once

// Portable random streams. std::mt19937_64 is bit-specified by the standard;
// the distributions in <random> are not, so every draw used by the library is
// derived here from raw 64-bit outputs.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lrsm {

// SplitMix64 finalizer; used for seed derivation and stable hashing.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Order-sensitive stable hash of a list of words.
std::uint64_t stable_hash(std::initializer_list<std::uint64_t> words) noexcept;

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform();

  // Uniform on {0, ..., n-1}; rejection sampling keeps it unbiased.
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

  // Student t with integer degrees of freedom.
  double student_t(int dof);

  // Independent child stream.
  Rng split(std::uint64_t salt) { return Rng(stable_hash({next_u64(), salt})); }

private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace lrsm
