#include "fidtrust/image_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fidtrust {

namespace {

struct Plane {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> v;

  double operator()(std::size_t y, std::size_t x) const { return v[y * width + x]; }
};

std::array<double, kSsimWindow> gaussian_window() {
  std::array<double, kSsimWindow> w{};
  const double centre = static_cast<double>(kSsimWindow / 2);
  double total = 0.0;
  for (std::size_t i = 0; i < kSsimWindow; ++i) {
    const double d = static_cast<double>(i) - centre;
    w[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

// Separable valid-mode Gaussian filter.
Plane filter_valid(const Plane& in, const std::array<double, kSsimWindow>& w) {
  const std::size_t oh = in.height - kSsimWindow + 1;
  const std::size_t ow = in.width - kSsimWindow + 1;
  Plane rows{in.height, ow, std::vector<double>(in.height * ow, 0.0)};
  for (std::size_t y = 0; y < in.height; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t t = 0; t < kSsimWindow; ++t) acc += w[t] * in(y, x + t);
      rows.v[y * ow + x] = acc;
    }
  }
  Plane out{oh, ow, std::vector<double>(oh * ow, 0.0)};
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t t = 0; t < kSsimWindow; ++t) acc += w[t] * rows(y + t, x);
      out.v[y * ow + x] = acc;
    }
  }
  return out;
}

Plane product(const Plane& a, const Plane& b) {
  Plane out{a.height, a.width, a.v};
  for (std::size_t p = 0; p < out.v.size(); ++p) out.v[p] *= b.v[p];
  return out;
}

Plane mean_pool2(const Plane& in) {
  Plane out{in.height / 2, in.width / 2, {}};
  out.v.resize(out.height * out.width);
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      out.v[y * out.width + x] =
          0.25 * (in(2 * y, 2 * x) + in(2 * y, 2 * x + 1) + in(2 * y + 1, 2 * x) + in(2 * y + 1, 2 * x + 1));
    }
  }
  return out;
}

struct ScaleTerms {
  double cs = 0.0;    // mean contrast-structure
  double ssim = 0.0;  // mean luminance * contrast-structure
};

ScaleTerms ssim_terms(const Plane& x, const Plane& y, double c1, double c2,
                      const std::array<double, kSsimWindow>& w) {
  const Plane mx = filter_valid(x, w);
  const Plane my = filter_valid(y, w);
  const Plane exx = filter_valid(product(x, x), w);
  const Plane eyy = filter_valid(product(y, y), w);
  const Plane exy = filter_valid(product(x, y), w);
  double cs_total = 0.0;
  double ssim_total = 0.0;
  for (std::size_t p = 0; p < mx.v.size(); ++p) {
    const double ux = mx.v[p];
    const double uy = my.v[p];
    const double vx = exx.v[p] - ux * ux;
    const double vy = eyy.v[p] - uy * uy;
    const double cxy = exy.v[p] - ux * uy;
    const double cs = (2.0 * cxy + c2) / (vx + vy + c2);
    const double lum = (2.0 * ux * uy + c1) / (ux * ux + uy * uy + c1);
    cs_total += cs;
    ssim_total += lum * cs;
  }
  const double n = static_cast<double>(mx.v.size());
  return {cs_total / n, ssim_total / n};
}

double ms_ssim_plane(Plane x, Plane y, double range, std::size_t scales) {
  const double c1 = (kSsimK1 * range) * (kSsimK1 * range);
  const double c2 = (kSsimK2 * range) * (kSsimK2 * range);
  const auto w = gaussian_window();

  double weight_total = 0.0;
  for (std::size_t s = 0; s < scales; ++s) weight_total += kMsSsimWeights[s];

  double result = 1.0;
  for (std::size_t s = 0; s < scales; ++s) {
    const ScaleTerms t = ssim_terms(x, y, c1, c2, w);
    const double term = (s + 1 == scales) ? t.ssim : t.cs;
    result *= std::pow(std::max(term, 0.0), kMsSsimWeights[s] / weight_total);
    if (s + 1 < scales) {
      x = mean_pool2(x);
      y = mean_pool2(y);
    }
  }
  return result;
}

}  // namespace

double mae(const ImageTensor& a, const ImageTensor& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("mae: image shapes differ");
  if (a.size() == 0) throw std::invalid_argument("mae: empty images");
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  double acc = 0.0;
  for (std::size_t p = 0; p < pa.size(); ++p) acc += std::abs(pa[p] - pb[p]);
  return acc / static_cast<double>(pa.size());
}

std::size_t max_ms_ssim_scales(std::size_t height, std::size_t width) {
  const std::size_t side = std::min(height, width);
  std::size_t scales = 0;
  while (scales < kMsSsimWeights.size() && side >= (std::size_t{1} << scales) * kSsimWindow) ++scales;
  return scales;
}

double ms_ssim(const ImageTensor& a, const ImageTensor& b, const MsSsimOptions& options) {
  if (!a.same_shape(b)) throw std::invalid_argument("ms_ssim: image shapes differ");
  if (options.scales < 1 || options.scales > kMsSsimWeights.size()) {
    throw std::invalid_argument("ms_ssim: scales must be in [1, 5]");
  }
  const std::size_t needed = (std::size_t{1} << (options.scales - 1)) * kSsimWindow;
  if (std::min(a.height(), a.width()) < needed) {
    throw std::invalid_argument("ms_ssim: image " + std::to_string(a.height()) + "x" +
                                std::to_string(a.width()) + " too small for " + std::to_string(options.scales) +
                                " scales (need min side " + std::to_string(needed) + ")");
  }
  const double range = a.range().span();
  if (!(range > 0.0)) throw std::invalid_argument("ms_ssim: value range must be positive");

  double total = 0.0;
  for (std::size_t c = 0; c < a.channels(); ++c) {
    Plane x{a.height(), a.width(), a.plane(c)};
    Plane y{b.height(), b.width(), b.plane(c)};
    total += ms_ssim_plane(std::move(x), std::move(y), range, options.scales);
  }
  return total / static_cast<double>(a.channels());
}

}  // namespace fidtrust
