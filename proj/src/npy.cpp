#include "fidtrust/npy.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>

namespace fidtrust {

static_assert(std::endian::native == std::endian::little, "npy codec assumes a little-endian host");

namespace {

constexpr char kMagic[] = "\x93NUMPY";
constexpr std::size_t kMagicLen = 6;
constexpr std::size_t kAlign = 64;

std::size_t item_size(NpyDtype dtype) {
  switch (dtype) {
    case NpyDtype::f4: return 4;
    case NpyDtype::f8: return 8;
    case NpyDtype::u1: return 1;
  }
  return 0;
}

// Minimal reader for the Python-literal dict numpy writes.
class HeaderParser {
 public:
  explicit HeaderParser(std::string_view text) : text_(text) {}

  void parse(std::string& descr, bool& fortran, std::vector<std::size_t>& shape) {
    bool seen_descr = false, seen_fortran = false, seen_shape = false;
    skip_ws();
    expect('{');
    for (;;) {
      skip_ws();
      if (peek() == '}') break;
      const std::string key = parse_string();
      skip_ws();
      expect(':');
      skip_ws();
      if (key == "descr") {
        descr = parse_string();
        seen_descr = true;
      } else if (key == "fortran_order") {
        fortran = parse_bool();
        seen_fortran = true;
      } else if (key == "shape") {
        shape = parse_tuple();
        seen_shape = true;
      } else {
        throw NpyError("malformed header: unexpected key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') ++pos_;
    }
    if (!seen_descr || !seen_fortran || !seen_shape) throw NpyError("malformed header: missing key");
  }

 private:
  char peek() const {
    if (pos_ >= text_.size()) throw NpyError("malformed header: truncated dictionary");
    return text_[pos_];
  }
  void expect(char c) {
    if (peek() != c) throw NpyError(std::string("malformed header: expected '") + c + "'");
    ++pos_;
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  std::string parse_string() {
    const char quote = peek();
    if (quote != '\'' && quote != '"') throw NpyError("malformed header: expected string");
    ++pos_;
    const auto end = text_.find(quote, pos_);
    if (end == std::string_view::npos) throw NpyError("malformed header: unterminated string");
    std::string out(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }
  bool parse_bool() {
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    throw NpyError("malformed header: expected True or False");
  }
  std::vector<std::size_t> parse_tuple() {
    std::vector<std::size_t> out;
    expect('(');
    for (;;) {
      skip_ws();
      if (peek() == ')') {
        ++pos_;
        return out;
      }
      if (!std::isdigit(static_cast<unsigned char>(peek()))) throw NpyError("malformed header: bad shape");
      std::size_t v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        v = v * 10 + static_cast<std::size_t>(text_[pos_] - '0');
        ++pos_;
      }
      out.push_back(v);
      skip_ws();
      if (peek() == ',') ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string npy_descr(NpyDtype dtype) {
  switch (dtype) {
    case NpyDtype::f4: return "<f4";
    case NpyDtype::f8: return "<f8";
    case NpyDtype::u1: return "|u1";
  }
  return "";
}

std::size_t NpyArray::count() const {
  std::size_t n = 1;
  for (const auto s : shape) n *= s;
  return n;
}

std::string npy_header(NpyDtype dtype, std::span<const std::size_t> shape) {
  std::string dict = "{'descr': '" + npy_descr(dtype) + "', 'fortran_order': False, 'shape': (";
  for (std::size_t d = 0; d < shape.size(); ++d) {
    if (d) dict += ", ";
    dict += std::to_string(shape[d]);
  }
  if (shape.size() == 1) dict += ",";
  dict += "), }";
  const std::size_t preamble = kMagicLen + 2 + 2;
  const std::size_t total = preamble + dict.size() + 1;
  const std::size_t padded = (total + kAlign - 1) / kAlign * kAlign;
  dict.append(padded - total, ' ');
  dict += '\n';
  return dict;
}

std::vector<char> encode_npy(const NpyArray& array) {
  if (array.data.size() != array.count()) throw NpyError("npy: data length does not match shape");
  const std::string header = npy_header(array.dtype, array.shape);
  if (header.size() > 0xFFFF) throw NpyError("npy: header too long for format 1.0");

  const std::size_t item = item_size(array.dtype);
  std::vector<char> out(kMagicLen + 4 + header.size() + array.data.size() * item);
  char* p = out.data();
  std::memcpy(p, kMagic, kMagicLen);
  p += kMagicLen;
  const auto len = static_cast<std::uint16_t>(header.size());
  *p++ = 1;
  *p++ = 0;
  *p++ = static_cast<char>(len & 0xFF);
  *p++ = static_cast<char>(len >> 8);
  std::memcpy(p, header.data(), header.size());
  p += header.size();

  for (const double v : array.data) {
    switch (array.dtype) {
      case NpyDtype::f8:
        std::memcpy(p, &v, 8);
        break;
      case NpyDtype::f4: {
        const auto f = static_cast<float>(v);
        std::memcpy(p, &f, 4);
        break;
      }
      case NpyDtype::u1:
        *p = static_cast<char>(static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0)));
        break;
    }
    p += item;
  }
  return out;
}

NpyArray decode_npy(std::span<const char> bytes) {
  if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    throw NpyError("malformed header: missing NUMPY magic");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    offset = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) throw NpyError("malformed header: truncated preamble");
    for (int b = 3; b >= 0; --b) header_len = (header_len << 8) | static_cast<unsigned char>(bytes[8 + b]);
    offset = 12;
  } else {
    throw NpyError("malformed header: unsupported format version " + std::to_string(major));
  }
  if (bytes.size() < offset + header_len) throw NpyError("malformed header: truncated header");

  std::string descr;
  bool fortran = false;
  NpyArray out;
  HeaderParser(std::string_view(bytes.data() + offset, header_len)).parse(descr, fortran, out.shape);
  if (fortran) throw NpyError("unsupported layout: fortran_order arrays are not accepted");
  if (descr == "<f8") {
    out.dtype = NpyDtype::f8;
  } else if (descr == "<f4") {
    out.dtype = NpyDtype::f4;
  } else if (descr == "|u1" || descr == "<u1") {
    out.dtype = NpyDtype::u1;
  } else {
    throw NpyError("unsupported dtype '" + descr + "' (expected <f4, <f8 or |u1)");
  }

  const std::size_t n = out.count();
  const std::size_t width = item_size(out.dtype);
  const std::size_t payload = offset + header_len;
  if (bytes.size() - payload != n * width) {
    throw NpyError("payload size " + std::to_string(bytes.size() - payload) + " does not match shape (" +
                   std::to_string(n * width) + " bytes expected)");
  }
  out.data.resize(n);
  const char* p = bytes.data() + payload;
  for (std::size_t e = 0; e < n; ++e, p += width) {
    switch (out.dtype) {
      case NpyDtype::f8: std::memcpy(&out.data[e], p, 8); break;
      case NpyDtype::f4: {
        float f;
        std::memcpy(&f, p, 4);
        out.data[e] = f;
        break;
      }
      case NpyDtype::u1: out.data[e] = static_cast<unsigned char>(*p); break;
    }
  }
  return out;
}

NpyArray read_npy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NpyError("cannot open '" + path.string() + "'");
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_npy(bytes);
  } catch (const NpyError& e) {
    throw NpyError(path.string() + ": " + e.what());
  }
}

void write_npy(const std::filesystem::path& path, const NpyArray& array) {
  const std::vector<char> bytes = encode_npy(array);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw NpyError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw NpyError("write failed for '" + path.string() + "'");
}

}  // namespace fidtrust
