#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace fidtrust {

/// Philox4x32-10 block function (Salmon et al., Random123).
///
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits. This
/// is the only source of randomness in the library, so every seeded
/// operation is reproducible bit-for-bit from its (seed, stream, draw)
/// coordinates alone.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Sequential view over one Philox stream.
///
/// The key is the seed; counter words are (block_lo, block_hi, stream_lo,
/// stream_hi). Block b of stream s yields four 32-bit words, consumed in
/// order. `next_u64` takes two words (first word is the high half).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 bits of resolution; one 64-bit draw.
  double uniform();

  /// Standard normal via Box-Muller (cosine branch only); two 64-bit draws.
  double normal();

  /// Uniform integer in [0, n) by 64x64->128 multiply; one 64-bit draw.
  std::uint64_t uniform_index(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

/// Child seed for `tag` under `seed` (one Philox block, fixed domain word).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// Child seed for a textual label (FNV-1a of the label, then derive_seed).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace fidtrust
