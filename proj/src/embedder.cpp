#include "fidtrust/embedder.hpp"

#include "fidtrust/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fidtrust {

void ToyEmbedderConfig::validate() const {
  if (embed_dim < 1) throw std::invalid_argument("embedder: embed_dim must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw std::invalid_argument("embedder: dropout rate must be in [0, 1)");
  }
  if (channels != 1 && channels != 3) throw std::invalid_argument("embedder: channels must be 1 or 3");
  if (pool_grid < 1) throw std::invalid_argument("embedder: pool grid must be >= 1");
  if (height < pool_grid || width < pool_grid) {
    throw std::invalid_argument("embedder: input size must be at least the pooling grid");
  }
  for (const auto h : hidden_dims) {
    if (h < 1) throw std::invalid_argument("embedder: hidden layer widths must be >= 1");
  }
}

Embedder::Embedder(ToyEmbedderConfig config) : config_(std::move(config)) {
  config_.validate();
  std::vector<std::size_t> widths = {config_.pool_grid * config_.pool_grid * config_.channels};
  widths.insert(widths.end(), config_.hidden_dims.begin(), config_.hidden_dims.end());
  widths.push_back(config_.embed_dim);

  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer layer;
    layer.in = widths[l];
    layer.out = widths[l + 1];
    layer.weights_t.resize(layer.in * layer.out);
    layer.bias.resize(layer.out);
    const double scale = 1.0 / std::sqrt(static_cast<double>(layer.in));
    CounterRng rng(config_.weight_seed, l);
    // Draw order: W row by row (output unit major), then the bias.
    for (std::size_t o = 0; o < layer.out; ++o) {
      for (std::size_t f = 0; f < layer.in; ++f) layer.weights_t[f * layer.out + o] = scale * rng.normal();
    }
    for (std::size_t o = 0; o < layer.out; ++o) layer.bias[o] = scale * rng.normal();
    layers_.push_back(std::move(layer));
  }
}

std::vector<double> Embedder::features(const ImageTensor& input, EmbedDiagnostics* diag) const {
  input.validate();
  const ImageTensor* img = &input;
  ImageTensor conformed;
  if (input.height() != config_.height || input.width() != config_.width) {
    conformed = resize_nearest(input, config_.height, config_.width);
    img = &conformed;
    if (diag) ++diag->resized;
  }

  const std::size_t H = config_.height;
  const std::size_t W = config_.width;
  const std::size_t C = config_.channels;
  const std::size_t G = config_.pool_grid;
  const ValueRange range = img->range();
  const bool convert = img->channels() != C;
  if (convert && diag) ++diag->channel_converted;

  // Per-image standardisation over all pixels and channels; the deviation
  // is floored at 1/sqrt(N) so flat images stay finite.
  double shift = 0.0;
  double scale = 1.0 / range.span();
  if (config_.standardize) {
    const auto px = img->pixels();
    const double n = static_cast<double>(px.size());
    double mean = 0.0;
    for (const double v : px) mean += v;
    mean /= n;
    double var = 0.0;
    for (const double v : px) var += (v - mean) * (v - mean);
    const double sd = std::max(std::sqrt(var / n), 1.0 / std::sqrt(n));
    shift = mean;
    scale = 1.0 / sd;
  } else {
    shift = range.lo;
  }

  std::vector<double> out(G * G * C, 0.0);
  for (std::size_t gy = 0; gy < G; ++gy) {
    const std::size_t y0 = gy * H / G;
    const std::size_t y1 = ((gy + 1) * H + G - 1) / G;
    for (std::size_t gx = 0; gx < G; ++gx) {
      const std::size_t x0 = gx * W / G;
      const std::size_t x1 = ((gx + 1) * W + G - 1) / G;
      const double cell = static_cast<double>((y1 - y0) * (x1 - x0));
      for (std::size_t c = 0; c < C; ++c) {
        double acc = 0.0;
        for (std::size_t y = y0; y < y1; ++y) {
          for (std::size_t x = x0; x < x1; ++x) {
            double v;
            if (!convert) {
              v = img->at(y, x, c);
            } else if (img->channels() == 1) {
              v = img->at(y, x, 0);
            } else {
              v = (img->at(y, x, 0) + img->at(y, x, 1) + img->at(y, x, 2)) / 3.0;
            }
            acc += (v - shift) * scale;
          }
        }
        out[(gy * G + gx) * C + c] = acc / cell;
      }
    }
  }
  return out;
}

DropoutMasks Embedder::sample_masks(std::uint64_t sample_seed, std::size_t j) const {
  const double p = config_.dropout_rate;
  const double keep_scale = 1.0 / (1.0 - p);
  CounterRng rng(sample_seed, j);
  DropoutMasks masks;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    std::vector<double> m(layers_[l].out);
    for (double& v : m) v = rng.uniform() < 1.0 - p ? keep_scale : 0.0;
    masks.push_back(std::move(m));
  }
  return masks;
}

void Embedder::forward(std::span<const double> features, std::span<double> out, const DropoutMasks* masks,
                       std::vector<std::vector<double>>* hidden) const {
  if (features.size() != feature_dim() || out.size() != embed_dim()) {
    throw std::invalid_argument("embedder: forward buffer size mismatch");
  }
  std::vector<double> x(features.begin(), features.end());
  std::vector<double> y;
  if (hidden) hidden->clear();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    y.assign(layer.bias.begin(), layer.bias.end());
    // Each output accumulates over inputs in ascending order.
    for (std::size_t f = 0; f < layer.in; ++f) {
      const double xf = x[f];
      if (xf == 0.0) continue;
      const double* w = layer.weights_t.data() + f * layer.out;
      for (std::size_t o = 0; o < layer.out; ++o) y[o] += xf * w[o];
    }
    const bool last = l + 1 == layers_.size();
    if (!last) {
      for (double& v : y) v = v > 0.0 ? v : 0.0;
      if (masks) {
        const auto& m = (*masks)[l];
        for (std::size_t o = 0; o < y.size(); ++o) y[o] *= m[o];
      }
      if (hidden) hidden->push_back(y);
    }
    x.swap(y);
  }
  std::copy(x.begin(), x.end(), out.begin());
}

Embedder build_toy_embedder(const ToyEmbedderConfig& config) { return Embedder(config); }

RowMatrix embed_features(const Embedder& e, std::span<const ImageTensor> images, EmbedDiagnostics* diag) {
  if (images.empty()) throw std::invalid_argument("embed: no input images");
  RowMatrix feats(static_cast<Eigen::Index>(images.size()), static_cast<Eigen::Index>(e.feature_dim()));
  std::vector<EmbedDiagnostics> local(images.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t i = 0; i < images.size(); ++i) {
    try {
      const auto f = e.features(images[i], &local[i]);
      std::copy(f.begin(), f.end(), feats.data() + i * e.feature_dim());
    } catch (...) {
#pragma omp critical(embed_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  if (diag) {
    for (const auto& d : local) {
      diag->resized += d.resized;
      diag->channel_converted += d.channel_converted;
    }
  }
  return feats;
}

EmbeddingSet embed_features_pass(const Embedder& e, const RowMatrix& features, const DropoutMasks* masks) {
  const auto n = static_cast<std::size_t>(features.rows());
  EmbeddingSet out(n, e.embed_dim());
  const std::size_t fdim = e.feature_dim();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    e.forward({features.data() + i * fdim, fdim}, out.row(i), masks);
  }
  return out;
}

EmbeddingSet embed_deterministic(const Embedder& e, std::span<const ImageTensor> images, EmbedDiagnostics* diag) {
  return embed_features_pass(e, embed_features(e, images, diag), nullptr);
}

EmbeddingSet embed_single_pass(const Embedder& e, std::span<const ImageTensor> images, std::uint64_t sample_seed,
                               std::size_t j, EmbedDiagnostics* diag) {
  const DropoutMasks masks = e.sample_masks(sample_seed, j);
  return embed_features_pass(e, embed_features(e, images, diag), &masks);
}

StochasticEmbeddingSet embed_stochastic_features(const Embedder& e, const RowMatrix& features, std::size_t J,
                                                 std::uint64_t sample_seed) {
  if (J < 2) throw std::invalid_argument("embed_stochastic: need J >= 2 evaluation passes");
  const auto n = static_cast<std::size_t>(features.rows());
  if (n == 0) throw std::invalid_argument("embed_stochastic: no input images");
  std::vector<DropoutMasks> masks(J);
  for (std::size_t j = 0; j < J; ++j) masks[j] = e.sample_masks(sample_seed, j);

  StochasticEmbeddingSet out(n, J, e.embed_dim());
  const std::size_t fdim = e.feature_dim();
  const std::size_t total = n * J;
#pragma omp parallel for schedule(static)
  for (std::size_t t = 0; t < total; ++t) {
    const std::size_t i = t / J;
    const std::size_t j = t % J;
    e.forward({features.data() + i * fdim, fdim}, out.vector(i, j), &masks[j]);
  }
  return out;
}

StochasticEmbeddingSet embed_stochastic(const Embedder& e, std::span<const ImageTensor> images, std::size_t J,
                                        std::uint64_t sample_seed, EmbedDiagnostics* diag) {
  if (J < 2) throw std::invalid_argument("embed_stochastic: need J >= 2 evaluation passes");
  if (e.config().dropout_rate == 0.0 && diag) {
    diag->warnings.emplace_back("dropout rate is 0: stochastic passes equal the deterministic embedding");
  }
  return embed_stochastic_features(e, embed_features(e, images, diag), J, sample_seed);
}

AnyEmbeddings load_embeddings(const std::filesystem::path& path) {
  NpyArray arr = read_npy(path);
  if (arr.dtype == NpyDtype::u1) throw NpyError(path.string() + ": embeddings must be float32 or float64");
  for (const double v : arr.data) {
    if (!std::isfinite(v)) throw NpyError(path.string() + ": non-finite entries");
  }
  if (arr.shape.size() == 2) {
    RowMatrix m(static_cast<Eigen::Index>(arr.shape[0]), static_cast<Eigen::Index>(arr.shape[1]));
    std::copy(arr.data.begin(), arr.data.end(), m.data());
    return EmbeddingSet(std::move(m));
  }
  if (arr.shape.size() == 3) {
    return StochasticEmbeddingSet(arr.shape[0], arr.shape[1], arr.shape[2], std::move(arr.data));
  }
  throw NpyError(path.string() + ": wrong rank " + std::to_string(arr.shape.size()) +
                 " (expected 2 for (I, K) or 3 for (I, J, K))");
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingSet& set, NpyDtype dtype) {
  NpyArray arr;
  arr.dtype = dtype;
  arr.shape = {set.images(), set.dim()};
  arr.data.assign(set.matrix().data(), set.matrix().data() + set.matrix().size());
  write_npy(path, arr);
}

void save_embeddings(const std::filesystem::path& path, const StochasticEmbeddingSet& set, NpyDtype dtype) {
  NpyArray arr;
  arr.dtype = dtype;
  arr.shape = {set.images(), set.samples(), set.dim()};
  arr.data.assign(set.values().begin(), set.values().end());
  write_npy(path, arr);
}

}  // namespace fidtrust
