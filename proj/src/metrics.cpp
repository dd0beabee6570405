#include "fidtrust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace fidtrust {

namespace {

RowMatrix slice_matrix(const StochasticEmbeddingSet& set, std::size_t j) {
  return set.slice(j).matrix();
}

void require_samples(std::size_t samples, const char* what) {
  if (samples < 2) throw std::invalid_argument(std::string(what) + ": need J >= 2 evaluations");
}

double shifted_mean(std::span<const double> v) {
  const double origin = v.front();
  double acc = 0.0;
  for (const double x : v) acc += x - origin;
  return origin + acc / static_cast<double>(v.size());
}

}  // namespace

FidDistribution fid_samples(const StochasticEmbeddingSet& test, const PreparedGaussian& reference) {
  if (test.dim() != static_cast<std::size_t>(reference.mean.size())) {
    throw std::invalid_argument("fid_samples: test dimension " + std::to_string(test.dim()) +
                                " does not match reference dimension " +
                                std::to_string(reference.mean.size()));
  }
  if (test.images() < 2) throw std::invalid_argument("fid_samples: need at least 2 test images");
  require_samples(test.samples(), "fid_samples");

  const std::size_t J = test.samples();
  std::vector<FrechetTerms> terms(J);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t j = 0; j < J; ++j) {
    try {
      terms[j] = frechet_terms(mean_and_cov(slice_matrix(test, j)), reference);
    } catch (...) {
#pragma omp critical(fid_samples_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  FidDistribution out;
  out.reference_epsilon = reference.epsilon;
  out.fid_samples.reserve(J);
  for (const auto& t : terms) {
    out.fid_samples.push_back(t.value);
    out.terms_a.push_back(t.mean_term);
    out.terms_b.push_back(t.trace_term);
    out.terms_c.push_back(t.cross_term);
    out.sample_epsilons.push_back(t.epsilon_first);
    if (t.clamped) ++out.clamp_count;
  }
  const FidStats stats = fid_stats(out.fid_samples);
  out.mean_fid = stats.mean;
  out.v_fid = stats.variance;
  out.sigma_fid = stats.sigma;
  return out;
}

FidDistribution fid_samples(const StochasticEmbeddingSet& test, const GaussianSummary& reference) {
  return fid_samples(test, prepare_gaussian(reference));
}

FidStats fid_stats(std::span<const double> values) {
  require_samples(values.size(), "fid_stats");
  FidStats s;
  s.mean = shifted_mean(values);
  double acc = 0.0;
  for (const double x : values) acc += (x - s.mean) * (x - s.mean);
  s.variance = acc / static_cast<double>(values.size() - 1);
  s.sigma = std::sqrt(s.variance);
  return s;
}

double sample_covariance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("sample_covariance: length mismatch");
  require_samples(u.size(), "sample_covariance");
  const double mu = shifted_mean(u);
  const double mv = shifted_mean(v);
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += (u[j] - mu) * (v[j] - mv);
  return acc / static_cast<double>(u.size() - 1);
}

double pvar(const StochasticEmbeddingSet& test) {
  require_samples(test.samples(), "pvar");
  if (test.images() == 0 || test.dim() == 0) throw std::invalid_argument("pvar: empty embedding set");
  const std::size_t I = test.images();
  const std::size_t J = test.samples();
  const std::size_t K = test.dim();
  const double norm = static_cast<double>(K) * static_cast<double>(J - 1);

  std::vector<double> per_image(I);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < I; ++i) {
    // Deviations are taken about the first evaluation, so J identical
    // evaluations give exactly zero.
    const auto first = test.vector(i, 0);
    std::vector<double> centre(K, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      const auto l = test.vector(i, j);
      for (std::size_t k = 0; k < K; ++k) centre[k] += l[k] - first[k];
    }
    for (double& c : centre) c /= static_cast<double>(J);
    double acc = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      const auto l = test.vector(i, j);
      for (std::size_t k = 0; k < K; ++k) {
        const double d = (l[k] - first[k]) - centre[k];
        acc += d * d;
      }
    }
    per_image[i] = acc / norm;
  }
  double total = 0.0;
  for (const double v : per_image) total += v;
  return total / static_cast<double>(I);
}

VfidDecomposition vfid_decomposition(const FidDistribution& dist) {
  const auto& a = dist.terms_a;
  const auto& b = dist.terms_b;
  const auto& c = dist.terms_c;
  if (a.size() != b.size() || a.size() != c.size()) {
    throw std::invalid_argument("vfid_decomposition: term vectors differ in length");
  }
  require_samples(a.size(), "vfid_decomposition");

  VfidDecomposition d;
  d.var_a = sample_covariance(a, a);
  d.var_b = sample_covariance(b, b);
  d.var_c = sample_covariance(c, c);
  d.cov_ab = sample_covariance(a, b);
  d.cov_ac = sample_covariance(a, c);
  d.cov_bc = sample_covariance(b, c);
  d.reconstructed_vfid =
      d.var_a + d.var_b + 4.0 * d.var_c + 2.0 * d.cov_ab - 4.0 * d.cov_ac - 4.0 * d.cov_bc;
  d.residual = d.reconstructed_vfid - dist.v_fid;
  return d;
}

RowMatrix l2_normalize_rows(const RowMatrix& m) {
  RowMatrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double sq = 0.0;
    for (Eigen::Index k = 0; k < out.cols(); ++k) sq += out(i, k) * out(i, k);
    const double n = std::sqrt(sq);
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw std::invalid_argument("knn: row " + std::to_string(i) + " has zero or non-finite norm");
    }
    out.row(i) /= n;
  }
  return out;
}

double knn_ood_score(const EmbeddingSet& test, const EmbeddingSet& reference, std::size_t k) {
  if (k == 0) throw std::invalid_argument("knn: k must be positive");
  if (reference.images() < k) {
    throw std::invalid_argument("knn: reference has " + std::to_string(reference.images()) +
                                " rows, fewer than k = " + std::to_string(k));
  }
  if (test.images() == 0) throw std::invalid_argument("knn: empty test set");
  if (test.dim() != reference.dim()) throw std::invalid_argument("knn: dimension mismatch");

  const RowMatrix q = l2_normalize_rows(test.matrix());
  const RowMatrix r = l2_normalize_rows(reference.matrix());
  const std::size_t n_ref = reference.images();
  const std::size_t dim = test.dim();

  std::vector<double> per_row(test.images());
#pragma omp parallel
  {
    std::vector<std::pair<double, std::size_t>> dist(n_ref);
#pragma omp for schedule(static)
    for (std::size_t i = 0; i < test.images(); ++i) {
      const double* qi = q.data() + i * dim;
      for (std::size_t m = 0; m < n_ref; ++m) {
        const double* rm = r.data() + m * dim;
        double sq = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double diff = qi[d] - rm[d];
          sq += diff * diff;
        }
        dist[m] = {std::sqrt(sq), m};
      }
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
      double acc = 0.0;
      for (std::size_t n = 0; n < k; ++n) acc += dist[n].first;
      per_row[i] = acc / static_cast<double>(k);
    }
  }
  double total = 0.0;
  for (const double v : per_row) total += v;
  return total / static_cast<double>(per_row.size());
}

double mean_embedding_norm(const StochasticEmbeddingSet& test) {
  const std::size_t count = test.images() * test.samples();
  if (count == 0 || test.dim() == 0) throw std::invalid_argument("mean_embedding_norm: empty embedding set");
  double total = 0.0;
  for (std::size_t i = 0; i < test.images(); ++i) {
    for (std::size_t j = 0; j < test.samples(); ++j) {
      double sq = 0.0;
      for (const double v : test.vector(i, j)) sq += v * v;
      total += std::sqrt(sq);
    }
  }
  return total / static_cast<double>(count);
}

MeanTermDiagnostics mean_term_diagnostics(const StochasticEmbeddingSet& test,
                                          std::span<const double> reference_mean) {
  require_samples(test.samples(), "mean_term_diagnostics");
  if (reference_mean.size() != test.dim()) {
    throw std::invalid_argument("mean_term_diagnostics: dimension mismatch");
  }
  if (test.images() == 0) throw std::invalid_argument("mean_term_diagnostics: empty embedding set");
  const std::size_t I = test.images();
  const std::size_t J = test.samples();
  const std::size_t K = test.dim();

  // per_j[k][j] = mean over images of l[i, j, k]
  std::vector<std::vector<double>> per_j(K, std::vector<double>(J, 0.0));
  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t i = 0; i < I; ++i) {
      const auto l = test.vector(i, j);
      for (std::size_t k = 0; k < K; ++k) per_j[k][j] += l[k];
    }
    for (std::size_t k = 0; k < K; ++k) per_j[k][j] /= static_cast<double>(I);
  }

  MeanTermDiagnostics out;
  double std_total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const FidStats s = fid_stats(per_j[k]);
    const double d = s.mean - reference_mean[k];
    out.mean_term += d * d;
    std_total += s.sigma;
  }
  out.mean_std = std_total / static_cast<double>(K);
  return out;
}

}  // namespace fidtrust
