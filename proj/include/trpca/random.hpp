#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace trpca {

/// Seedable generator with portable output.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distributions are implemented here rather than taken from
/// <random>, whose algorithms differ between standard libraries:
///   uniform()   top 53 bits of one draw, scaled to [0, 1)
///   below(n)    rejection sampling on the largest multiple of n
///   normal()    Box-Muller, both outputs used in turn
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double normal();
  std::uint64_t below(std::uint64_t n);
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer; a bijective 64-bit mix.
std::uint64_t mix64(std::uint64_t x);

/// Child seed for an independent stream identified by `path` under `base`.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

}  // namespace trpca
