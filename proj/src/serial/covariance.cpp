#include "fidtrust/serial.hpp"

#include <stdexcept>

namespace fidtrust::serial {

GaussianSummary mean_and_cov(const RowMatrix& samples) {
  const Eigen::Index n = samples.rows();
  const Eigen::Index dim = samples.cols();
  if (n < 2) throw std::invalid_argument("mean_and_cov: need at least 2 samples");
  if (!samples.allFinite()) throw std::invalid_argument("mean_and_cov: non-finite sample entries");

  GaussianSummary out;
  out.n_samples = static_cast<std::size_t>(n);
  out.mean = Vector::Zero(dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < dim; ++k) out.mean[k] += samples(i, k);
  out.mean /= static_cast<double>(n);

  out.cov = Matrix::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = a; b < dim; ++b) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) acc += (samples(i, a) - out.mean[a]) * (samples(i, b) - out.mean[b]);
      out.cov(a, b) = acc / static_cast<double>(n - 1);
      out.cov(b, a) = out.cov(a, b);
    }
  }
  return out;
}

}  // namespace fidtrust::serial
