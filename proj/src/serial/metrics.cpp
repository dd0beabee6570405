#include "fidtrust/serial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fidtrust::serial {

FidDistribution fid_samples(const StochasticEmbeddingSet& test, const GaussianSummary& reference) {
  if (static_cast<Eigen::Index>(test.dim()) != reference.dim()) throw std::invalid_argument("fid_samples: dimension mismatch");
  if (test.images() < 2) throw std::invalid_argument("fid_samples: need at least 2 test images");
  if (test.samples() < 2) throw std::invalid_argument("fid_samples: need J >= 2 evaluations");
  const PreparedGaussian ref = prepare_gaussian(reference);

  FidDistribution out;
  out.reference_epsilon = ref.epsilon;
  for (std::size_t j = 0; j < test.samples(); ++j) {
    const FrechetTerms t = frechet_terms(serial::mean_and_cov(test.slice(j).matrix()), ref);
    out.fid_samples.push_back(t.value);
    out.terms_a.push_back(t.mean_term);
    out.terms_b.push_back(t.trace_term);
    out.terms_c.push_back(t.cross_term);
    out.sample_epsilons.push_back(t.epsilon_first);
    if (t.clamped) ++out.clamp_count;
  }
  const FidStats s = fid_stats(out.fid_samples);
  out.mean_fid = s.mean;
  out.v_fid = s.variance;
  out.sigma_fid = s.sigma;
  return out;
}

double pvar(const StochasticEmbeddingSet& test) {
  if (test.samples() < 2) throw std::invalid_argument("pvar: need J >= 2 evaluations");
  if (test.images() == 0 || test.dim() == 0) throw std::invalid_argument("pvar: empty embedding set");
  const std::size_t J = test.samples();
  const std::size_t K = test.dim();
  double total = 0.0;
  for (std::size_t i = 0; i < test.images(); ++i) {
    std::vector<double> centre(K, 0.0);
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t k = 0; k < K; ++k) centre[k] += test.at(i, j, k) - test.at(i, 0, k);
    for (double& c : centre) c /= static_cast<double>(J);
    double acc = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      for (std::size_t k = 0; k < K; ++k) {
        const double d = (test.at(i, j, k) - test.at(i, 0, k)) - centre[k];
        acc += d * d;
      }
    }
    total += acc / (static_cast<double>(K) * static_cast<double>(J - 1));
  }
  return total / static_cast<double>(test.images());
}

double knn_ood_score(const EmbeddingSet& test, const EmbeddingSet& reference, std::size_t k) {
  if (k == 0 || reference.images() < k) throw std::invalid_argument("knn: k out of range");
  if (test.images() == 0) throw std::invalid_argument("knn: empty test set");
  if (test.dim() != reference.dim()) throw std::invalid_argument("knn: dimension mismatch");
  const RowMatrix q = l2_normalize_rows(test.matrix());
  const RowMatrix r = l2_normalize_rows(reference.matrix());

  double total = 0.0;
  std::vector<std::pair<double, std::size_t>> dist(reference.images());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index m = 0; m < r.rows(); ++m) {
      double sq = 0.0;
      for (Eigen::Index d = 0; d < q.cols(); ++d) sq += (q(i, d) - r(m, d)) * (q(i, d) - r(m, d));
      dist[static_cast<std::size_t>(m)] = {std::sqrt(sq), static_cast<std::size_t>(m)};
    }
    std::sort(dist.begin(), dist.end());
    double acc = 0.0;
    for (std::size_t n = 0; n < k; ++n) acc += dist[n].first;
    total += acc / static_cast<double>(k);
  }
  return total / static_cast<double>(test.images());
}

}  // namespace fidtrust::serial
