#pragma once

#include <array>
#include <cstdint>

namespace volfit {

// Philox4x32-10 counter-based generator. A (seed, stream) pair names an
// independent 2^64-block sequence, so per-path substreams never overlap and a
// fixed seed reproduces the same draws regardless of evaluation order.
class Philox {
 public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  double uniform();      // [0, 1), 53-bit resolution
  double uniform_pos();  // (0, 1)
  double normal();       // standard normal, Box-Muller
  double gamma(double alpha);  // Gamma(alpha, 1), Marsaglia-Tsang

  // Generator for substream `idx` under the same seed.
  Philox substream(std::uint64_t idx) const { return Philox(seed_, idx); }

 private:
  void refill();

  std::uint64_t seed_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_;
  int pos_;
  double spare_;
  bool has_spare_;
};

}  // namespace volfit
