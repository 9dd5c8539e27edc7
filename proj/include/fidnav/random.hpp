#pragma once

#include <cstdint>
#include <random>

#include "fidnav/attitude.hpp"

namespace fidnav {

/// Seeded Gaussian source. One instance per run; never shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }
  Vec3 gaussian3() {
    const double a = gaussian();
    const double b = gaussian();
    const double c = gaussian();
    return {a, b, c};
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// splitmix64 finalizer; derives well-separated per-run seeds from a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace fidnav
