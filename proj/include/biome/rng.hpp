#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace biome {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632BE59BD9B4E019ull));
}

// Small portable generator. All draws are derived from integer arithmetic so
// streams are identical on every platform; normals use Box-Muller over our own
// uniforms instead of <random> distributions, whose algorithms are unspecified.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection keeps the result unbiased.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Independent child stream; does not advance this generator.
  Rng fork(std::uint64_t tag) const { return Rng(hash_combine(state_, tag)); }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class Substep : std::uint32_t {
  AgentNoise = 1,
  Spawn = 2,
  AirSpread = 3,
  EarthSlide = 4,
  Resolve = 5,
  Reproduce = 6,
  Mutate = 7,
};

// Deterministic stream keyed by (seed, step, substep, index). Any cell can
// derive its own draws without touching shared state, which keeps parallel
// kernels reproducible regardless of scheduling.
struct StepRng {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;

  Rng stream(Substep substep, std::uint64_t index = 0) const {
    std::uint64_t key = hash_combine(seed, step);
    key = hash_combine(key, static_cast<std::uint64_t>(substep));
    key = hash_combine(key, index);
    return Rng(key);
  }

  StepRng at_step(std::uint64_t s) const { return StepRng{seed, s}; }
};

}  // namespace biome
