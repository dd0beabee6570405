#include "fidtrust/serial.hpp"

#include <stdexcept>

namespace fidtrust::serial {

StochasticEmbeddingSet embed_stochastic_features(const Embedder& e, const RowMatrix& features, std::size_t J,
                                                 std::uint64_t sample_seed) {
  if (J < 2) throw std::invalid_argument("embed_stochastic: need J >= 2 evaluation passes");
  const auto n = static_cast<std::size_t>(features.rows());
  if (n == 0) throw std::invalid_argument("embed_stochastic: no input images");
  StochasticEmbeddingSet out(n, J, e.embed_dim());
  const std::size_t fdim = e.feature_dim();
  for (std::size_t j = 0; j < J; ++j) {
    const DropoutMasks masks = e.sample_masks(sample_seed, j);
    for (std::size_t i = 0; i < n; ++i) e.forward({features.data() + i * fdim, fdim}, out.vector(i, j), &masks);
  }
  return out;
}

}  // namespace fidtrust::serial
