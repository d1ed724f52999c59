#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace persist {

using uint128 = unsigned __int128;

/// Philox4x64-10 block function (Salmon et al., Random123).
/// Maps a 256-bit counter and a 128-bit key to 256 pseudorandom bits.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr,
                                        std::array<std::uint64_t, 2> key);

/*!
 * Counter-based random stream.
 *
 * The key is (master_seed, stream_index); the 128-bit block counter walks
 * forward as output is consumed. Two streams with equal seed and index
 * produce the same sequence; distinct indices select distinct keys.
 */
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index, uint128 counter = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  /// Standard exponential.
  double exponential();
  /// +1 or -1 with equal probability, one bit per call.
  int sign();

  std::uint64_t master_seed() const { return key_[0]; }
  std::uint64_t stream_index() const { return key_[1]; }
  /// Index of the next block to be generated.
  uint128 counter() const { return counter_; }

 private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  uint128 counter_;
  std::array<std::uint64_t, 4> block_{};
  int pos_ = 4;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Stream for one trial. Pure in its arguments, so the result does not
/// depend on which worker runs the trial.
inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
  return RngStream(master_seed, trial_index);
}

/// SplitMix64 finalizer, used to derive sub-seeds (curve points, cases).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace persist
