#pragma once

#include "fidtrust/embeddings.hpp"
#include "fidtrust/image.hpp"
#include "fidtrust/npy.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fidtrust {

struct ToyEmbedderConfig {
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t channels = 3;
  std::size_t embed_dim = 64;
  std::vector<std::size_t> hidden_dims = {256, 128};
  double dropout_rate = 0.2;
  std::uint64_t weight_seed = 0;
  std::size_t pool_grid = 8;  // adaptive average pooling to pool_grid x pool_grid cells
  bool standardize = true;     // per-image zero mean / unit deviation before pooling

  void validate() const;
};

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights_t;  // in x out, row-major (transposed weight matrix)
  std::vector<double> bias;       // out
};

/// Per-hidden-layer inverted-dropout multipliers: 0 or 1/(1-p).
using DropoutMasks = std::vector<std::vector<double>>;

struct EmbedDiagnostics {
  std::size_t resized = 0;           // images brought to the configured size
  std::size_t channel_converted = 0;  // grey <-> colour conversions
  std::vector<std::string> warnings;
};

/// Fixed random-feature network standing in for a pretrained encoder:
/// per-image standardised pixels (or, with standardize off, pixels mapped
/// to [0, 1] by the image's value range), adaptive average
/// pooling to a grid, hidden affine+ReLU layers, and a final affine
/// projection to K. Weights are N(0, 1/fan_in) draws from
/// CounterRng(weight_seed, layer). Immutable after construction.
class Embedder {
 public:
  explicit Embedder(ToyEmbedderConfig config);

  const ToyEmbedderConfig& config() const { return config_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::size_t feature_dim() const { return layers_.front().in; }
  std::size_t embed_dim() const { return layers_.back().out; }

  /// Pooled input features of one image, after conforming size/channels.
  std::vector<double> features(const ImageTensor& img, EmbedDiagnostics* diag = nullptr) const;

  /// Masks of evaluation pass j: CounterRng(sample_seed, j) draws one
  /// uniform per hidden unit, layer by layer; a unit is kept if u < 1-p.
  DropoutMasks sample_masks(std::uint64_t sample_seed, std::size_t j) const;

  /// Runs the network on one feature vector. `masks` null means dropout off.
  /// If `hidden` is given it receives each hidden layer's output (after
  /// ReLU and dropout).
  void forward(std::span<const double> features, std::span<double> out, const DropoutMasks* masks,
               std::vector<std::vector<double>>* hidden = nullptr) const;

 private:
  ToyEmbedderConfig config_;
  std::vector<DenseLayer> layers_;
};

Embedder build_toy_embedder(const ToyEmbedderConfig& config);

/// Pooled features for a batch, one row per image (parallel over images).
RowMatrix embed_features(const Embedder& e, std::span<const ImageTensor> images,
                         EmbedDiagnostics* diag = nullptr);

/// Dropout off. Throws std::invalid_argument on an empty batch.
EmbeddingSet embed_deterministic(const Embedder& e, std::span<const ImageTensor> images,
                                 EmbedDiagnostics* diag = nullptr);

/// One evaluation pass with the masks of pass j (dropout on).
EmbeddingSet embed_single_pass(const Embedder& e, std::span<const ImageTensor> images,
                               std::uint64_t sample_seed, std::size_t j, EmbedDiagnostics* diag = nullptr);

/// J evaluation passes; pass j shares one mask set across all images.
/// Throws std::invalid_argument for J < 2 or an empty batch. With p = 0 a
/// warning is recorded and every slice equals the deterministic output.
StochasticEmbeddingSet embed_stochastic(const Embedder& e, std::span<const ImageTensor> images,
                                        std::size_t J, std::uint64_t sample_seed,
                                        EmbedDiagnostics* diag = nullptr);

/// Same passes, starting from precomputed pooled features.
StochasticEmbeddingSet embed_stochastic_features(const Embedder& e, const RowMatrix& features, std::size_t J,
                                                 std::uint64_t sample_seed);
EmbeddingSet embed_features_pass(const Embedder& e, const RowMatrix& features, const DropoutMasks* masks);

using AnyEmbeddings = std::variant<EmbeddingSet, StochasticEmbeddingSet>;

/// Rank 2 -> EmbeddingSet (I, K); rank 3 -> StochasticEmbeddingSet (I, J, K).
/// Throws NpyError on malformed files, wrong rank or non-finite values.
AnyEmbeddings load_embeddings(const std::filesystem::path& path);

void save_embeddings(const std::filesystem::path& path, const EmbeddingSet& set, NpyDtype dtype = NpyDtype::f8);
void save_embeddings(const std::filesystem::path& path, const StochasticEmbeddingSet& set,
                     NpyDtype dtype = NpyDtype::f8);

}  // namespace fidtrust
