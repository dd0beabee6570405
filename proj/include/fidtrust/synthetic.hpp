#pragma once

#include "fidtrust/image.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fidtrust {

enum class SyntheticKind { blobs, textures, mixed };

/// Seeded generator description, written "kind:count[:shift]" on the
/// command line, e.g. "blobs:16" or "mixed:512:0.3".
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::mixed;
  std::size_t count = 16;
  double shift = 0.0;  // amplitude of a fixed band pattern added to every image
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t channels = 3;

  std::string to_string() const;
};

SyntheticSpec parse_synthetic_spec(const std::string& text);

/// Images in nominal range [0, 1]; image i draws from
/// CounterRng(derive_seed(seed, i), 0). Even indices are blobs and odd
/// indices textures for the mixed kind. A nonzero shift adds
/// shift * P to every image, where P alternates sign over four horizontal
/// bands and is weighted (1, 0, -1) across RGB channels. The base content
/// does not depend on the shift, so sets that differ only in shift are
/// paired image by image.
std::vector<ImageTensor> make_synthetic_set(const SyntheticSpec& spec, std::uint64_t seed);

ImageTensor make_synthetic_image(SyntheticKind kind, std::size_t height, std::size_t width, std::size_t channels,
                                 double shift, std::uint64_t seed);

}  // namespace fidtrust
