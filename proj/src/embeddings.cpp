#include "fidtrust/embeddings.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fidtrust {

EmbeddingSet::EmbeddingSet(RowMatrix data) : data_(std::move(data)) {}

EmbeddingSet::EmbeddingSet(std::size_t images, std::size_t dim)
    : data_(RowMatrix::Zero(static_cast<Eigen::Index>(images), static_cast<Eigen::Index>(dim))) {}

std::span<const double> EmbeddingSet::row(std::size_t i) const {
  return {data_.data() + i * dim(), dim()};
}

std::span<double> EmbeddingSet::row(std::size_t i) { return {data_.data() + i * dim(), dim()}; }

StochasticEmbeddingSet::StochasticEmbeddingSet(std::size_t images, std::size_t samples, std::size_t dim)
    : images_(images), samples_(samples), dim_(dim), values_(images * samples * dim, 0.0) {}

StochasticEmbeddingSet::StochasticEmbeddingSet(std::size_t images, std::size_t samples, std::size_t dim,
                                               std::vector<double> values)
    : images_(images), samples_(samples), dim_(dim), values_(std::move(values)) {
  if (values_.size() != images * samples * dim) {
    throw std::invalid_argument("StochasticEmbeddingSet: value count " + std::to_string(values_.size()) +
                                " does not match shape");
  }
}

StochasticEmbeddingSet StochasticEmbeddingSet::stack(std::span<const EmbeddingSet> passes) {
  if (passes.empty()) return {};
  const std::size_t images = passes.front().images();
  const std::size_t dim = passes.front().dim();
  StochasticEmbeddingSet out(images, passes.size(), dim);
  for (std::size_t j = 0; j < passes.size(); ++j) {
    if (passes[j].images() != images || passes[j].dim() != dim) {
      throw std::invalid_argument("StochasticEmbeddingSet::stack: passes differ in shape");
    }
    for (std::size_t i = 0; i < images; ++i) {
      const auto src = passes[j].row(i);
      std::copy(src.begin(), src.end(), out.vector(i, j).begin());
    }
  }
  return out;
}

std::span<const double> StochasticEmbeddingSet::vector(std::size_t i, std::size_t j) const {
  return {values_.data() + (i * samples_ + j) * dim_, dim_};
}

std::span<double> StochasticEmbeddingSet::vector(std::size_t i, std::size_t j) {
  return {values_.data() + (i * samples_ + j) * dim_, dim_};
}

EmbeddingSet StochasticEmbeddingSet::slice(std::size_t j) const {
  if (j >= samples_) throw std::out_of_range("StochasticEmbeddingSet::slice: sample index out of range");
  EmbeddingSet out(images_, dim_);
  for (std::size_t i = 0; i < images_; ++i) {
    const auto src = vector(i, j);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

void StochasticEmbeddingSet::validate() const {
  if (images_ < 2 || samples_ < 2 || dim_ < 1) {
    throw std::invalid_argument("stochastic embeddings need I >= 2, J >= 2, K >= 1 (got " +
                                std::to_string(images_) + "x" + std::to_string(samples_) + "x" +
                                std::to_string(dim_) + ")");
  }
  for (const double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("stochastic embeddings contain non-finite entries");
  }
}

}  // namespace fidtrust
