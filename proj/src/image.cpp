#include "fidtrust/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fidtrust {

ImageTensor::ImageTensor(std::size_t height, std::size_t width, std::size_t channels, ValueRange range)
    : height_(height), width_(width), channels_(channels), pixels_(height * width * channels, 0.0),
      range_(range) {}

ImageTensor::ImageTensor(std::size_t height, std::size_t width, std::size_t channels,
                         std::vector<double> pixels, ValueRange range)
    : height_(height), width_(width), channels_(channels), pixels_(std::move(pixels)), range_(range) {
  if (pixels_.size() != height * width * channels) {
    throw std::invalid_argument("ImageTensor: pixel count does not match shape");
  }
}

double ImageTensor::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const double v : pixels_) m = std::max(m, v);
  return m;
}

std::vector<double> ImageTensor::plane(std::size_t c) const {
  std::vector<double> out(height_ * width_);
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = pixels_[p * channels_ + c];
  return out;
}

void ImageTensor::validate() const {
  if (height_ == 0 || width_ == 0) throw std::invalid_argument("image has an empty dimension");
  if (channels_ != 1 && channels_ != 3) {
    throw std::invalid_argument("image must have 1 or 3 channels, got " + std::to_string(channels_));
  }
  if (!(range_.lo < range_.hi)) throw std::invalid_argument("image value range must satisfy lo < hi");
  for (const double v : pixels_) {
    if (!std::isfinite(v)) throw std::invalid_argument("image contains non-finite pixels");
  }
}

ImageTensor resize_nearest(const ImageTensor& img, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw std::invalid_argument("resize_nearest: empty target size");
  if (img.height() == height && img.width() == width) return img;
  ImageTensor out(height, width, img.channels(), img.range());
  for (std::size_t y = 0; y < height; ++y) {
    const std::size_t sy = std::min(img.height() - 1, (y * img.height()) / height);
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t sx = std::min(img.width() - 1, (x * img.width()) / width);
      for (std::size_t c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(sy, sx, c);
    }
  }
  return out;
}

}  // namespace fidtrust
