#include "fidtrust/synthetic.hpp"

#include "fidtrust/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fidtrust {

namespace {

constexpr double kShiftOpponent[3] = {1.0, 0.0, -1.0};

double lerp(double lo, double hi, double u) { return lo + (hi - lo) * u; }

void fill_blobs(ImageTensor& img, CounterRng& rng) {
  const double H = static_cast<double>(img.height());
  const double W = static_cast<double>(img.width());
  const std::size_t C = img.channels();
  double background[3];
  for (std::size_t c = 0; c < C; ++c) background[c] = lerp(0.05, 0.25, rng.uniform());
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x)
      for (std::size_t c = 0; c < C; ++c) img.at(y, x, c) = background[c];

  const std::size_t blobs = 2 + rng.uniform_index(4);
  for (std::size_t b = 0; b < blobs; ++b) {
    const double cy = rng.uniform() * H;
    const double cx = rng.uniform() * W;
    const double sigma = lerp(std::min(H, W) / 16.0, std::min(H, W) / 5.0, rng.uniform());
    double colour[3];
    for (std::size_t c = 0; c < C; ++c) colour[c] = lerp(0.3, 0.8, rng.uniform());
    for (std::size_t y = 0; y < img.height(); ++y) {
      for (std::size_t x = 0; x < img.width(); ++x) {
        const double dy = static_cast<double>(y) + 0.5 - cy;
        const double dx = static_cast<double>(x) + 0.5 - cx;
        const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        for (std::size_t c = 0; c < C; ++c) img.at(y, x, c) += colour[c] * g;
      }
    }
  }
}

void fill_texture(ImageTensor& img, CounterRng& rng) {
  const std::size_t C = img.channels();
  const double cycles = lerp(1.0, 6.0, rng.uniform());
  const double angle = rng.uniform() * std::numbers::pi;
  const double phase = rng.uniform() * 2.0 * std::numbers::pi;
  const double contrast = lerp(0.2, 0.5, rng.uniform());
  double mean[3], gain[3];
  for (std::size_t c = 0; c < C; ++c) {
    mean[c] = lerp(0.3, 0.7, rng.uniform());
    gain[c] = lerp(0.5, 1.0, rng.uniform());
  }
  const double ky = std::sin(angle) * cycles * 2.0 * std::numbers::pi / static_cast<double>(img.height());
  const double kx = std::cos(angle) * cycles * 2.0 * std::numbers::pi / static_cast<double>(img.width());
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      const double s = std::sin(ky * static_cast<double>(y) + kx * static_cast<double>(x) + phase);
      for (std::size_t c = 0; c < C; ++c) img.at(y, x, c) = mean[c] + contrast * gain[c] * s;
    }
  }
}

}  // namespace

std::string SyntheticSpec::to_string() const {
  std::ostringstream os;
  os << (kind == SyntheticKind::blobs ? "blobs" : kind == SyntheticKind::textures ? "textures" : "mixed") << ':'
     << count;
  if (shift != 0.0) os << ':' << shift;
  return os.str();
}

SyntheticSpec parse_synthetic_spec(const std::string& text) {
  SyntheticSpec spec;
  const auto first = text.find(':');
  if (first == std::string::npos) throw std::invalid_argument("synthetic spec must look like kind:count[:shift]");
  const std::string kind = text.substr(0, first);
  if (kind == "blobs") {
    spec.kind = SyntheticKind::blobs;
  } else if (kind == "textures") {
    spec.kind = SyntheticKind::textures;
  } else if (kind == "mixed") {
    spec.kind = SyntheticKind::mixed;
  } else {
    throw std::invalid_argument("unknown synthetic kind '" + kind + "' (blobs, textures or mixed)");
  }
  const auto second = text.find(':', first + 1);
  try {
    std::size_t used = 0;
    const std::string count = text.substr(first + 1, second == std::string::npos ? std::string::npos : second - first - 1);
    const long long n = std::stoll(count, &used);
    if (used != count.size() || n < 1) throw std::invalid_argument("count");
    spec.count = static_cast<std::size_t>(n);
    if (second != std::string::npos) {
      const std::string shift = text.substr(second + 1);
      spec.shift = std::stod(shift, &used);
      if (used != shift.size()) throw std::invalid_argument("shift");
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("malformed synthetic spec '" + text + "'");
  }
  return spec;
}

ImageTensor make_synthetic_image(SyntheticKind kind, std::size_t height, std::size_t width, std::size_t channels,
                                 double shift, std::uint64_t seed) {
  if (channels != 1 && channels != 3) throw std::invalid_argument("synthetic: channels must be 1 or 3");
  ImageTensor img(height, width, channels, ValueRange{0.0, 1.0});
  CounterRng rng(seed, 0);
  if (kind == SyntheticKind::textures) {
    fill_texture(img, rng);
  } else {
    fill_blobs(img, rng);
  }
  if (shift != 0.0) {
    // Four horizontal bands of alternating sign, colour-opponent across channels.
    for (std::size_t y = 0; y < height; ++y) {
      const double band = (4 * y / height) % 2 == 0 ? -1.0 : 1.0;
      for (std::size_t x = 0; x < width; ++x) {
        for (std::size_t c = 0; c < channels; ++c) {
          img.at(y, x, c) += shift * band * (channels == 1 ? 1.0 : kShiftOpponent[c]);
        }
      }
    }
  }
  return img;
}

std::vector<ImageTensor> make_synthetic_set(const SyntheticSpec& spec, std::uint64_t seed) {
  std::vector<ImageTensor> out(spec.count);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < spec.count; ++i) {
    SyntheticKind kind = spec.kind;
    if (kind == SyntheticKind::mixed) kind = i % 2 == 0 ? SyntheticKind::blobs : SyntheticKind::textures;
    out[i] = make_synthetic_image(kind, spec.height, spec.width, spec.channels, spec.shift,
                                  derive_seed(seed, static_cast<std::uint64_t>(i)));
  }
  return out;
}

}  // namespace fidtrust
