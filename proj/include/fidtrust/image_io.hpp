#pragma once

#include "fidtrust/image.hpp"

#include <filesystem>
#include <vector>

namespace fidtrust {

/// Binary 8-bit PGM (P5) or PPM (P6). Range is recorded as [0, maxval].
ImageTensor read_pnm(const std::filesystem::path& path);

/// Writes P5 for one channel, P6 for three. Values are mapped from the
/// image's range to [0, 255], rounded and clamped.
void write_pnm(const std::filesystem::path& path, const ImageTensor& img);

/// .npy image of shape (H, W) or (H, W, C). u1 arrays get range [0, 255];
/// float arrays get [0, 1] when all values lie there, [0, 255] when they fit
/// that, otherwise their own [min, max].
ImageTensor read_npy_image(const std::filesystem::path& path);
void write_npy_image(const std::filesystem::path& path, const ImageTensor& img);

/// Dispatches on extension: .pgm/.ppm/.pnm or .npy.
ImageTensor load_image(const std::filesystem::path& path);
void save_image(const std::filesystem::path& path, const ImageTensor& img);

bool is_image_file(const std::filesystem::path& path);

/// All supported images in a directory, sorted by file name. Throws
/// std::runtime_error if the directory is missing or holds no images.
std::vector<ImageTensor> load_image_dir(const std::filesystem::path& dir,
                                        std::vector<std::filesystem::path>* names = nullptr);

}  // namespace fidtrust
