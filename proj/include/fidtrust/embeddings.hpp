#pragma once

#include "fidtrust/linalg.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace fidtrust {

/// I x K deterministic latents, one row per image.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  explicit EmbeddingSet(RowMatrix data);
  EmbeddingSet(std::size_t images, std::size_t dim);

  std::size_t images() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(data_.cols()); }

  const RowMatrix& matrix() const { return data_; }
  RowMatrix& matrix() { return data_; }

  std::span<const double> row(std::size_t i) const;
  std::span<double> row(std::size_t i);

 private:
  RowMatrix data_;
};

/// I x J x K latents from J stochastic evaluations of each of I images.
/// Storage is row-major in (i, j, k).
class StochasticEmbeddingSet {
 public:
  StochasticEmbeddingSet() = default;
  StochasticEmbeddingSet(std::size_t images, std::size_t samples, std::size_t dim);
  StochasticEmbeddingSet(std::size_t images, std::size_t samples, std::size_t dim,
                         std::vector<double> values);

  /// Stacks J deterministic sets (all I x K) into one tensor.
  static StochasticEmbeddingSet stack(std::span<const EmbeddingSet> passes);

  std::size_t images() const { return images_; }
  std::size_t samples() const { return samples_; }
  std::size_t dim() const { return dim_; }

  double& at(std::size_t i, std::size_t j, std::size_t k) { return values_[(i * samples_ + j) * dim_ + k]; }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[(i * samples_ + j) * dim_ + k];
  }

  std::span<const double> vector(std::size_t i, std::size_t j) const;
  std::span<double> vector(std::size_t i, std::size_t j);

  /// The I x K matrix of evaluation j.
  EmbeddingSet slice(std::size_t j) const;

  std::span<const double> values() const { return values_; }

  /// Throws std::invalid_argument unless I >= 2, J >= 2, K >= 1 and all
  /// entries are finite.
  void validate() const;

 private:
  std::size_t images_ = 0;
  std::size_t samples_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

}  // namespace fidtrust
