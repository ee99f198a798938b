#pragma once

// Counter-based random streams (Philox4x32-10). A stream is addressed by a
// (seed, stream_id) pair; the seed is the key and the stream id occupies the
// upper half of the counter, so replica i of a run always sees the same
// draws regardless of which worker executes it.

#include <array>
#include <cstdint>

namespace skewbessel {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One application of the Philox4x32 bijection with 10 rounds.
PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53 random bits.
  double uniform();
  double normal();
  /// Gamma(shape, 1).
  double gamma(double shape);
  double beta(double a, double b);
  std::uint64_t poisson(double mean);

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const { return stream_id_; }
  /// Number of 32-bit words consumed so far.
  [[nodiscard]] std::uint64_t words_used() const { return words_; }

 private:
  static constexpr int kLanes = 4;  // blocks generated per refill

  std::uint32_t next_u32() {
    if (index_ == 4 * kLanes) refill();
    ++words_;
    return buffer_[index_++];
  }
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  PhiloxKey key_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4 * kLanes> buffer_{};
  int index_ = 4 * kLanes;
  std::uint64_t words_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace skewbessel
