#pragma once

#include "fidtrust/image.hpp"

#include <array>
#include <cstddef>

namespace fidtrust {

/// Mean absolute difference over all pixels and channels.
double mae(const ImageTensor& a, const ImageTensor& b);

/// Scale weights of the standard five-scale MS-SSIM (Wang, Simoncelli and
/// Bovik, 2003), finest scale first.
inline constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

struct MsSsimOptions {
  /// 1..5. Fewer than five scales use the first weights, renormalised to
  /// sum to one.
  std::size_t scales = 5;
};

/// Multi-scale SSIM with an 11x11 Gaussian window (sigma 1.5), valid-mode
/// filtering, 2x2 mean-pool downsampling, and stabilisers derived from the
/// first image's value range. Contrast-structure terms below zero are
/// clamped to zero before exponentiation. Channels are averaged.
/// Throws std::invalid_argument on shape mismatch or when the smaller side
/// is below 2^(scales-1) * 11.
double ms_ssim(const ImageTensor& a, const ImageTensor& b, const MsSsimOptions& options = {});

/// Largest scale count (at most 5) an image of this size supports; 0 when
/// even a single 11x11 window does not fit.
std::size_t max_ms_ssim_scales(std::size_t height, std::size_t width);

}  // namespace fidtrust
