#pragma once

#include "fidtrust/embeddings.hpp"
#include "fidtrust/linalg.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace fidtrust {

/// Per-evaluation FID values against one reference, with their a/b/c parts
/// kept so the variance decomposition is consistent with the FID values.
struct FidDistribution {
  std::vector<double> fid_samples;
  double mean_fid = 0.0;
  double v_fid = 0.0;      // sample variance, J-1 denominator
  double sigma_fid = 0.0;  // sqrt(v_fid)
  std::vector<double> terms_a;  // |mu_j - mu_ref|^2
  std::vector<double> terms_b;  // tr(S_j + S_ref)
  std::vector<double> terms_c;  // tr((S_j S_ref)^1/2)

  // diagnostics
  std::size_t clamp_count = 0;
  double reference_epsilon = 0.0;
  std::vector<double> sample_epsilons;
};

struct FidStats {
  double mean = 0.0;
  double variance = 0.0;
  double sigma = 0.0;
};

struct VfidDecomposition {
  double var_a = 0.0;
  double var_b = 0.0;
  double var_c = 0.0;
  double cov_ab = 0.0;
  double cov_ac = 0.0;
  double cov_bc = 0.0;
  double reconstructed_vfid = 0.0;
  double residual = 0.0;  // reconstructed_vfid - v_fid
};

struct MeanTermDiagnostics {
  double mean_term = 0.0;  // |mean_j(mu_j) - mu_ref|^2
  double mean_std = 0.0;   // mean over k of std_j(mu_j[k])
};

/// FID of every evaluation slice of `test` against `reference`.
/// Throws std::invalid_argument on dimension mismatch or I < 2.
FidDistribution fid_samples(const StochasticEmbeddingSet& test, const GaussianSummary& reference);
FidDistribution fid_samples(const StochasticEmbeddingSet& test, const PreparedGaussian& reference);

/// Mean, J-1 variance and standard deviation. Requires J >= 2.
/// The mean is accumulated about the first value, so J copies of c give
/// exactly (c, 0, 0).
FidStats fid_stats(std::span<const double> values);

/// Sample covariance (J-1) of two equally long series.
double sample_covariance(std::span<const double> u, std::span<const double> v);

/// Average over images of the normalised trace of the per-image covariance
/// across evaluations. Requires J >= 2.
double pvar(const StochasticEmbeddingSet& test);

VfidDecomposition vfid_decomposition(const FidDistribution& dist);

/// Mean over test rows of the mean Euclidean distance to the k nearest
/// reference rows, both sets L2-normalised row-wise. Exact search; ties go
/// to the lower reference index. Self-matches are not excluded.
double knn_ood_score(const EmbeddingSet& test, const EmbeddingSet& reference, std::size_t k = 5);

double mean_embedding_norm(const StochasticEmbeddingSet& test);

MeanTermDiagnostics mean_term_diagnostics(const StochasticEmbeddingSet& test,
                                          std::span<const double> reference_mean);

/// Row-wise L2 normalisation; throws on a zero row.
RowMatrix l2_normalize_rows(const RowMatrix& m);

}  // namespace fidtrust
