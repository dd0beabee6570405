#include "fidtrust/image_io.hpp"

#include "fidtrust/npy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

namespace fidtrust {

namespace fs = std::filesystem;

namespace {

std::string lower_ext(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(const std::vector<unsigned char>& bytes, std::size_t& pos) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::string tok;
  while (pos < bytes.size() && !std::isspace(bytes[pos])) tok.push_back(static_cast<char>(bytes[pos++]));
  if (tok.empty()) throw std::runtime_error("pnm: truncated header");
  return tok;
}

}  // namespace

ImageTensor read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  const std::string magic = pnm_token(bytes, pos);
  std::size_t channels;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw std::runtime_error(path.string() + ": unsupported PNM type '" + magic + "' (need P5 or P6)");
  }
  std::size_t width, height, maxval;
  try {
    width = std::stoul(pnm_token(bytes, pos));
    height = std::stoul(pnm_token(bytes, pos));
    maxval = std::stoul(pnm_token(bytes, pos));
  } catch (const std::logic_error&) {
    throw std::runtime_error(path.string() + ": malformed PNM header");
  }
  if (maxval == 0 || maxval > 255) throw std::runtime_error(path.string() + ": only 8-bit PNM is supported");
  ++pos;  // single whitespace byte before the raster
  const std::size_t n = width * height * channels;
  if (bytes.size() < pos + n) throw std::runtime_error(path.string() + ": truncated PNM raster");
  std::vector<double> px(n);
  for (std::size_t e = 0; e < n; ++e) px[e] = bytes[pos + e];
  ImageTensor img(height, width, channels, std::move(px), {0.0, static_cast<double>(maxval)});
  img.validate();
  return img;
}

void write_pnm(const fs::path& path, const ImageTensor& img) {
  img.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << (img.channels() == 1 ? "P5" : "P6") << '\n' << img.width() << ' ' << img.height() << "\n255\n";
  const ValueRange r = img.range();
  std::string raster(img.size(), '\0');
  const auto px = img.pixels();
  for (std::size_t e = 0; e < px.size(); ++e) {
    const double scaled = std::round((px[e] - r.lo) / r.span() * 255.0);
    raster[e] = static_cast<char>(static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0)));
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

ImageTensor read_npy_image(const fs::path& path) {
  NpyArray arr = read_npy(path);
  std::size_t channels = 1;
  if (arr.shape.size() == 3) {
    channels = arr.shape[2];
  } else if (arr.shape.size() != 2) {
    throw std::runtime_error(path.string() + ": image arrays must have rank 2 or 3");
  }
  ValueRange range{0.0, 255.0};
  if (arr.dtype != NpyDtype::u1 && !arr.data.empty()) {
    const auto [lo, hi] = std::minmax_element(arr.data.begin(), arr.data.end());
    if (*lo >= 0.0 && *hi <= 1.0) {
      range = {0.0, 1.0};
    } else if (*lo >= 0.0 && *hi <= 255.0) {
      range = {0.0, 255.0};
    } else {
      range = {*lo, *hi > *lo ? *hi : *lo + 1.0};
    }
  }
  ImageTensor img(arr.shape[0], arr.shape[1], channels, std::move(arr.data), range);
  img.validate();
  return img;
}

void write_npy_image(const fs::path& path, const ImageTensor& img) {
  NpyArray arr;
  arr.dtype = NpyDtype::f8;
  arr.shape = {img.height(), img.width()};
  if (img.channels() != 1) arr.shape.push_back(img.channels());
  arr.data.assign(img.pixels().begin(), img.pixels().end());
  write_npy(path, arr);
}

bool is_image_file(const fs::path& path) {
  const std::string ext = lower_ext(path);
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm" || ext == ".npy";
}

ImageTensor load_image(const fs::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".npy") return read_npy_image(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
  throw std::runtime_error(path.string() + ": unsupported image format (use PGM/PPM or .npy)");
}

void save_image(const fs::path& path, const ImageTensor& img) {
  const std::string ext = lower_ext(path);
  if (ext == ".npy") {
    write_npy_image(path, img);
  } else if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
    write_pnm(path, img);
  } else {
    throw std::runtime_error(path.string() + ": unsupported image format (use PGM/PPM or .npy)");
  }
}

std::vector<ImageTensor> load_image_dir(const fs::path& dir, std::vector<fs::path>* names) {
  if (!fs::is_directory(dir)) throw std::runtime_error("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  if (files.empty()) throw std::runtime_error("no images found in '" + dir.string() + "'");
  std::sort(files.begin(), files.end());
  std::vector<ImageTensor> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_image(f));
  if (names) *names = files;
  return out;
}

}  // namespace fidtrust
