#pragma once

// Counter-based randomness: every (seed, index) pair gets its own stream, so
// results do not depend on evaluation order or worker count.

#include <cstdint>
#include <random>

namespace robenv {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t index) : engine_(mix_seed(seed, index)) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, bound) by rejection; bound >= 1.
  std::uint64_t below(std::uint64_t bound);
  // Uniform on [0, 1) with 53 random bits.
  double unit();

 private:
  std::mt19937_64 engine_;
};

}  // namespace robenv
