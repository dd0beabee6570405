#pragma once

// Single-threaded reference versions of the parallel kernels. They follow
// the same accumulation order, so results match the parallel ones bit for bit.

#include "fidtrust/embedder.hpp"
#include "fidtrust/embeddings.hpp"
#include "fidtrust/linalg.hpp"
#include "fidtrust/metrics.hpp"

#include <cstddef>
#include <cstdint>

namespace fidtrust::serial {

GaussianSummary mean_and_cov(const RowMatrix& samples);

FidDistribution fid_samples(const StochasticEmbeddingSet& test, const GaussianSummary& reference);

double pvar(const StochasticEmbeddingSet& test);

double knn_ood_score(const EmbeddingSet& test, const EmbeddingSet& reference, std::size_t k = 5);

StochasticEmbeddingSet embed_stochastic_features(const Embedder& e, const RowMatrix& features, std::size_t J,
                                                 std::uint64_t sample_seed);

}  // namespace fidtrust::serial
