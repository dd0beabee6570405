#include "fidtrust/augment.hpp"

#include "fidtrust/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>

namespace fidtrust {

std::string to_string(AugmentKind kind) { return kind == AugmentKind::noise ? "noise" : "overlay"; }

AugmentKind parse_augment_kind(const std::string& text) {
  if (text == "noise") return AugmentKind::noise;
  if (text == "overlay") return AugmentKind::overlay;
  throw std::invalid_argument("unknown augmentation kind '" + text + "' (expected noise or overlay)");
}

void AugmentSpec::validate() const {
  if (!std::isfinite(strength_percent) || strength_percent < 0.0 || strength_percent > 1000.0) {
    throw std::invalid_argument("augment: strength must be in [0, 1000] percent");
  }
  if (kind == AugmentKind::overlay && !(patch_scale > 0.0 && patch_scale < 1.0)) {
    throw std::invalid_argument("augment: patch_scale must be in (0, 1)");
  }
}

ImageTensor noise_augment(const ImageTensor& img, double strength_percent, std::uint64_t seed) {
  if (!std::isfinite(strength_percent)) throw std::invalid_argument("noise_augment: non-finite strength");
  if (strength_percent < 0.0) throw std::invalid_argument("noise_augment: negative strength");
  double amplitude = 0.0;
  for (const double v : img.pixels()) amplitude = std::max(amplitude, std::abs(v));
  const double sigma = strength_percent / 100.0 * amplitude;
  if (sigma == 0.0) return img;

  ImageTensor out = img;
  CounterRng rng(seed, 0);
  for (double& v : out.pixels()) v += sigma * rng.normal();
  return out;
}

namespace {

// Converts a source image to the base's channel count and value range.
ImageTensor conform(const ImageTensor& src, std::size_t channels, const ValueRange& range) {
  ImageTensor out(src.height(), src.width(), channels, range);
  const double scale = range.span() / src.range().span();
  for (std::size_t y = 0; y < src.height(); ++y) {
    for (std::size_t x = 0; x < src.width(); ++x) {
      double grey = 0.0;
      if (src.channels() != channels) {
        for (std::size_t c = 0; c < src.channels(); ++c) grey += src.at(y, x, c);
        grey /= static_cast<double>(src.channels());
      }
      for (std::size_t c = 0; c < channels; ++c) {
        const double v = src.channels() == channels ? src.at(y, x, c) : grey;
        out.at(y, x, c) = range.lo + (v - src.range().lo) * scale;
      }
    }
  }
  return out;
}

}  // namespace

ImageTensor overlay_augment(const ImageTensor& base, std::span<const ImageTensor> patch_source,
                            std::size_t n_patches, double patch_scale, std::uint64_t seed,
                            std::vector<PatchPlacement>* placements) {
  if (n_patches == 0) return base;
  if (patch_source.empty()) throw std::invalid_argument("overlay_augment: no patch sources");
  if (!(patch_scale > 0.0 && patch_scale < 1.0)) {
    throw std::invalid_argument("overlay_augment: patch_scale must be in (0, 1)");
  }

  const std::size_t H = base.height();
  const std::size_t W = base.width();
  const std::size_t side = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(patch_scale * static_cast<double>(std::min(H, W)))));

  ImageTensor out = base;
  CounterRng rng(seed, 0);
  for (std::size_t n = 0; n < n_patches; ++n) {
    PatchPlacement place;
    place.source_index = static_cast<std::size_t>(rng.uniform_index(patch_source.size()));
    place.angle_degrees = rng.uniform() * 360.0;

    const ImageTensor& src = patch_source[place.source_index];
    src.validate();
    std::size_t ph, pw;
    if (src.height() >= src.width()) {
      ph = side;
      pw = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(
                                        static_cast<double>(src.width()) * side / src.height())));
    } else {
      pw = side;
      ph = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(
                                        static_cast<double>(src.height()) * side / src.width())));
    }
    const ImageTensor patch = conform(resize_nearest(src, ph, pw), base.channels(), base.range());

    const double theta = place.angle_degrees * std::numbers::pi / 180.0;
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);
    const double fh = static_cast<double>(ph);
    const double fw = static_cast<double>(pw);
    place.box_height = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fh * std::abs(cs) + fw * std::abs(sn) - 1e-9)));
    place.box_width = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fw * std::abs(cs) + fh * std::abs(sn) - 1e-9)));
    if (place.box_height > H || place.box_width > W) {
      throw std::invalid_argument("overlay_augment: rotated patch does not fit inside the base image");
    }
    place.top = static_cast<std::size_t>(rng.uniform_index(H - place.box_height + 1));
    place.left = static_cast<std::size_t>(rng.uniform_index(W - place.box_width + 1));

    const double half_bh = static_cast<double>(place.box_height) / 2.0;
    const double half_bw = static_cast<double>(place.box_width) / 2.0;
    for (std::size_t r = 0; r < place.box_height; ++r) {
      for (std::size_t c = 0; c < place.box_width; ++c) {
        const double dy = static_cast<double>(r) + 0.5 - half_bh;
        const double dx = static_cast<double>(c) + 0.5 - half_bw;
        // inverse rotation back into patch coordinates
        const double u = cs * dx + sn * dy + fw / 2.0;
        const double v = -sn * dx + cs * dy + fh / 2.0;
        if (u < 0.0 || v < 0.0 || u >= fw || v >= fh) continue;
        const auto sx = static_cast<std::size_t>(u);
        const auto sy = static_cast<std::size_t>(v);
        for (std::size_t ch = 0; ch < base.channels(); ++ch) {
          out.at(place.top + r, place.left + c, ch) = patch.at(sy, sx, ch);
        }
      }
    }
    if (placements) placements->push_back(place);
  }
  return out;
}

void clip_to_range(ImageTensor& img) {
  const ValueRange r = img.range();
  for (double& v : img.pixels()) v = std::clamp(v, r.lo, r.hi);
}

ImageTensor augment_one(const ImageTensor& image, std::size_t index, const AugmentSpec& spec,
                        std::span<const ImageTensor> patch_source) {
  const std::uint64_t seed = derive_seed(spec.seed, static_cast<std::uint64_t>(index));
  ImageTensor out = spec.kind == AugmentKind::noise
                        ? noise_augment(image, spec.strength_percent, seed)
                        : overlay_augment(image, patch_source, spec.n_patches, spec.patch_scale, seed);
  if (spec.clip) clip_to_range(out);
  return out;
}

std::vector<ImageTensor> augment_set(std::span<const ImageTensor> images, const AugmentSpec& spec,
                                     std::span<const ImageTensor> patch_source) {
  spec.validate();
  if (spec.kind == AugmentKind::overlay && spec.n_patches > 0 && patch_source.empty()) {
    throw std::invalid_argument("augment_set: overlay needs patch sources");
  }
  std::vector<ImageTensor> out(images.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t i = 0; i < images.size(); ++i) {
    try {
      out[i] = augment_one(images[i], i, spec, patch_source);
    } catch (...) {
#pragma omp critical(augment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace fidtrust
