#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fidtrust {

struct ValueRange {
  double lo = 0.0;
  double hi = 1.0;
  double span() const { return hi - lo; }
  bool operator==(const ValueRange&) const = default;
};

/// H x W x C image (C in {1, 3}) stored row-major, channels interleaved.
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(std::size_t height, std::size_t width, std::size_t channels, ValueRange range = {});
  ImageTensor(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> pixels,
              ValueRange range = {});

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  std::size_t size() const { return pixels_.size(); }

  double& at(std::size_t y, std::size_t x, std::size_t c) { return pixels_[(y * width_ + x) * channels_ + c]; }
  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return pixels_[(y * width_ + x) * channels_ + c];
  }

  std::span<const double> pixels() const { return pixels_; }
  std::span<double> pixels() { return pixels_; }

  const ValueRange& range() const { return range_; }
  void set_range(ValueRange r) { range_ = r; }

  double max_value() const;

  bool same_shape(const ImageTensor& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  /// One channel as an H x W plane.
  std::vector<double> plane(std::size_t c) const;

  /// Throws std::invalid_argument on empty dims, C not in {1,3},
  /// non-finite pixels or lo >= hi.
  void validate() const;

  bool operator==(const ImageTensor& other) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> pixels_;
  ValueRange range_;
};

/// Nearest-neighbour resize.
ImageTensor resize_nearest(const ImageTensor& img, std::size_t height, std::size_t width);

}  // namespace fidtrust
