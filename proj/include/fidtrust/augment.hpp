#pragma once

#include "fidtrust/image.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fidtrust {

enum class AugmentKind { noise, overlay };

std::string to_string(AugmentKind kind);
AugmentKind parse_augment_kind(const std::string& text);

struct AugmentSpec {
  AugmentKind kind = AugmentKind::noise;
  double strength_percent = 0.0;  // noise: sigma as % of the image's maximum
  std::size_t n_patches = 4;      // overlay
  double patch_scale = 0.25;      // overlay: patch side / min(H, W) of base
  std::uint64_t seed = 0;
  bool clip = false;  // clamp results to the image's value range

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Adds i.i.d. N(0, sigma^2) to every scalar entry, with
/// sigma = strength/100 * (largest absolute pixel value). Draws come from
/// CounterRng(seed, 0) in storage order. Strength 0 returns the input
/// unchanged. The result is not clipped.
ImageTensor noise_augment(const ImageTensor& img, double strength_percent, std::uint64_t seed);

/// Geometry of one pasted patch, exposed for bounds checks.
struct PatchPlacement {
  std::size_t source_index = 0;
  double angle_degrees = 0.0;
  std::size_t top = 0;
  std::size_t left = 0;
  std::size_t box_height = 0;
  std::size_t box_width = 0;
};

/// Pastes `n_patches` randomly chosen sources (with replacement), each
/// resized so its larger side is round(patch_scale * min(H, W)) and rotated
/// by a uniform angle about its centre (nearest neighbour, corners outside
/// the source are transparent), at a uniform position fully inside the
/// base. Per patch the stream CounterRng(seed, 0) yields, in order: source
/// index, angle, top, left.
ImageTensor overlay_augment(const ImageTensor& base, std::span<const ImageTensor> patch_source,
                            std::size_t n_patches, double patch_scale, std::uint64_t seed,
                            std::vector<PatchPlacement>* placements = nullptr);

/// Applies `spec` to every image; image i uses derive_seed(spec.seed, i),
/// so results do not depend on scheduling.
std::vector<ImageTensor> augment_set(std::span<const ImageTensor> images, const AugmentSpec& spec,
                                     std::span<const ImageTensor> patch_source = {});

/// Same as one element of augment_set.
ImageTensor augment_one(const ImageTensor& image, std::size_t index, const AugmentSpec& spec,
                        std::span<const ImageTensor> patch_source = {});

void clip_to_range(ImageTensor& img);

}  // namespace fidtrust
