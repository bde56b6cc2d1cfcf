#pragma once

#include <array>
#include <cstdint>

namespace rmx {

/// Philox4x32-10 counter-based generator. A (key, counter) pair maps to four
/// 32-bit words; distinct streams are independent by construction, which is
/// what the paired-draw discipline of the stochastic solvers relies on.
struct Philox {
  std::uint32_t key0 = 0;
  std::uint32_t key1 = 0;

  Philox() = default;
  explicit Philox(std::uint64_t seed)
      : key0(static_cast<std::uint32_t>(seed)), key1(static_cast<std::uint32_t>(seed >> 32)) {}

  std::array<std::uint32_t, 4> block(std::uint64_t counter_lo, std::uint64_t counter_hi) const;
};

/// Sequential view over one Philox stream: stream id selects the high counter
/// word, successive blocks come from the low counter word.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on (0, 1].
  double uniform();

  /// Standard normal via Box-Muller (second value cached).
  double normal();

 private:
  Philox philox_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace rmx
