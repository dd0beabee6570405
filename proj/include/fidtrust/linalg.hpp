#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace fidtrust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Sample matrices are stored one observation per row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Mean and covariance of a set of K-dimensional samples.
struct GaussianSummary {
  Vector mean;
  Matrix cov;
  std::size_t n_samples = 0;

  Eigen::Index dim() const { return mean.size(); }
};

// Tolerances shared by the PSD kernels.
inline constexpr double kSymmetryTolerance = 1e-10;       // relative Frobenius
inline constexpr double kNegativeEigenTolerance = 1e-8;   // times largest eigenvalue
inline constexpr double kRegularizeThreshold = 1e-10;     // smallest/largest eigenvalue
inline constexpr double kRegularizeScale = 1e-6;          // epsilon = scale * largest

/// Column means and unbiased (I-1) covariance, fixed summation order.
/// Throws std::invalid_argument on fewer than two rows or non-finite input.
GaussianSummary mean_and_cov(const RowMatrix& samples);

/// Principal square root of a symmetric PSD matrix via symmetric
/// eigendecomposition. Eigenvalues in [-1e-8*lambda_max, 0) are clamped.
/// Throws std::invalid_argument on asymmetry, std::domain_error on an
/// eigenvalue below the negative tolerance.
Matrix sqrtm_psd(const Matrix& m);

/// tr((A B)^1/2) evaluated as tr((S B S)^1/2) with S = sqrtm_psd(A).
double trace_sqrt_product(const Matrix& a, const Matrix& b);

struct RegularizedCovariance {
  Matrix cov;
  double epsilon = 0.0;  // 0 when no shift was needed
};

/// Adds epsilon*I (epsilon = 1e-6*lambda_max) when the smallest eigenvalue
/// falls below 1e-10*lambda_max; otherwise returns the input unchanged.
RegularizedCovariance regularize_covariance(const Matrix& cov);

/// Reference-side state reused across many Frechet evaluations against the
/// same summary: the regularized covariance and its square root.
struct PreparedGaussian {
  Vector mean;
  Matrix cov;
  Matrix cov_sqrt;
  double trace = 0.0;
  double epsilon = 0.0;
};

PreparedGaussian prepare_gaussian(const GaussianSummary& g);

/// Frechet distance with its additive parts: value = a + b - 2c.
struct FrechetTerms {
  double value = 0.0;
  double mean_term = 0.0;   // a = |mu1 - mu2|^2
  double trace_term = 0.0;  // b = tr(S1 + S2)
  double cross_term = 0.0;  // c = tr((S1 S2)^1/2)
  double epsilon_first = 0.0;
  double epsilon_second = 0.0;
  bool clamped = false;  // a + b - 2c came out negative and was set to 0
};

FrechetTerms frechet_terms(const GaussianSummary& first, const PreparedGaussian& second);
FrechetTerms frechet_terms(const GaussianSummary& first, const GaussianSummary& second);

/// Squared Frechet distance between two Gaussians (the FID formula).
double frechet_gaussian(const GaussianSummary& first, const GaussianSummary& second);

}  // namespace fidtrust
