#include "rmx/rng.hpp"

#include <cmath>

namespace rmx {

namespace {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox::block(std::uint64_t counter_lo, std::uint64_t counter_hi) const {
  std::array<std::uint32_t, 4> x = {
      static_cast<std::uint32_t>(counter_lo), static_cast<std::uint32_t>(counter_lo >> 32),
      static_cast<std::uint32_t>(counter_hi), static_cast<std::uint32_t>(counter_hi >> 32)};
  std::uint32_t k0 = key0;
  std::uint32_t k1 = key1;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMult0, x[0], hi0, lo0);
    mulhilo(kMult1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return x;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : philox_(seed), stream_id_(stream_id) {}

std::uint32_t RngStream::next_u32() {
  if (buf_pos_ == 4) {
    buf_ = philox_.block(counter_++, stream_id_);
    buf_pos_ = 0;
  }
  return buf_[static_cast<std::size_t>(buf_pos_++)];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform() {
  // 53-bit mantissa; shifted into (0, 1] so log() below is safe.
  const std::uint64_t bits = next_u64() >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

}  // namespace rmx
