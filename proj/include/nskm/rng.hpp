#pragma once

#include <cstdint>
#include <random>

namespace nskm {

// Platform-stable pseudo-random source. The engine's output sequence is fixed
// by the standard; the derived uniforms below avoid the implementation-defined
// std:: distributions so that a seed reproduces the same draws everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform double in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return uniform() < p; }

    double normal();

  private:
    std::mt19937_64 engine_;
};

// Seed for trial `index` of a batch started at `base`.
constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) { return base + index; }

}  // namespace nskm
