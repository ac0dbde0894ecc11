#pragma once

#include <cstdint>
#include <random>

namespace mineig {

// Seedable, splittable 64-bit generator. The stream is std::mt19937_64 seeded
// through a SplitMix64 finalizer; split() derives statistically independent
// child streams so parallel tasks stay reproducible.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  std::uint64_t seed() const noexcept { return seed_; }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller (portable across standard libraries).
  double normal();
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  Rng split(std::uint64_t stream) const { return Rng(derive(seed_, stream)); }

  static std::uint64_t mix(std::uint64_t z);
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mineig
