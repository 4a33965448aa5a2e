#include "volfit/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace volfit {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c, std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

}  // namespace

Philox::Philox(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), pos_(4), spare_(0.0), has_spare_(false) {
  // Words 0..1 count blocks; words 2..3 carry the stream id.
  counter_ = {0u, 0u, static_cast<std::uint32_t>(stream),
              static_cast<std::uint32_t>(stream >> 32)};
  block_ = {0u, 0u, 0u, 0u};
}

void Philox::refill() {
  std::array<std::uint32_t, 4> c = counter_;
  std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
  for (int r = 0; r < 10; ++r) {
    philox_round(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  block_ = c;
  pos_ = 0;
  if (++counter_[0] == 0u) ++counter_[1];
}

std::uint64_t Philox::next_u64() {
  if (pos_ > 2) refill();
  const std::uint64_t lo = block_[pos_];
  const std::uint64_t hi = block_[pos_ + 1];
  pos_ += 2;
  return lo | (hi << 32);
}

double Philox::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Philox::uniform_pos() {
  for (;;) {
    const double u = uniform();
    if (u > 0.0) return u;
  }
}

double Philox::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_pos();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double Philox::gamma(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("Philox::gamma: alpha must be > 0");
  if (alpha < 1.0) {
    // Boost a Gamma(alpha+1) draw down: G_a = G_{a+1} * U^{1/a}.
    const double u = uniform_pos();
    return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace volfit
