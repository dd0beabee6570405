#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fidtrust {

class NpyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NpyDtype { f4, f8, u1 };

std::string npy_descr(NpyDtype dtype);

/// Dense C-order array read from or written to a .npy (format 1.0) file.
/// Values are held as double; f4 and u1 payloads widen exactly, so a
/// load/save cycle with the same dtype is bit-exact.
struct NpyArray {
  std::vector<std::size_t> shape;
  NpyDtype dtype = NpyDtype::f8;
  std::vector<double> data;

  std::size_t count() const;
};

/// Header dictionary for a C-order array, padded with spaces and a
/// trailing newline so the payload starts on a 64-byte boundary.
std::string npy_header(NpyDtype dtype, std::span<const std::size_t> shape);

std::vector<char> encode_npy(const NpyArray& array);
NpyArray decode_npy(std::span<const char> bytes);

/// Reads little-endian '<f4', '<f8' or '|u1', fortran_order False.
/// Accepts format versions 1.0 and 2.0. Throws NpyError.
NpyArray read_npy(const std::filesystem::path& path);

/// Writes format 1.0. Throws NpyError on I/O failure.
void write_npy(const std::filesystem::path& path, const NpyArray& array);

}  // namespace fidtrust
