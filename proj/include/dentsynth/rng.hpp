#pragma once

#include <cstdint>
#include <random>

namespace dentsynth {

// Stream identifiers used to derive independent per-sample generators.
enum class StreamPurpose : std::uint64_t {
  deformation = 1,
  camera = 2,
  light = 3,
  background = 4,
  split = 5,
  training = 6,
  crunch = 7,
};

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based derivation: the same (seed, index, purpose) always yields the
// same stream regardless of which thread or in which order it is requested.
std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t index, StreamPurpose purpose);

// Thin wrapper over mt19937_64. The engine output sequence is fixed by the
// standard; the conversions to real/integer values below are done by hand
// because the std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t global_seed, std::uint64_t index, StreamPurpose purpose) {
    return Rng(derive_seed(global_seed, index, purpose));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace dentsynth
