#include "fidtrust/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fidtrust {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix is not square");
  }
}

Matrix checked_symmetric_part(const Matrix& m, const char* what) {
  require_square(m, what);
  const double scale = m.norm();
  const double asym = (m - m.transpose()).norm();
  if (!std::isfinite(scale) || asym > kSymmetryTolerance * scale) {
    throw std::invalid_argument(std::string(what) + ": matrix is not symmetric (asymmetry " +
                                std::to_string(asym) + " vs norm " + std::to_string(scale) + ")");
  }
  return 0.5 * (m + m.transpose());
}

void check_eigenvalues(const Vector& eigenvalues, const char* what) {
  if (eigenvalues.size() == 0) return;
  const double largest = eigenvalues.maxCoeff();
  const double smallest = eigenvalues.minCoeff();
  const double tolerance = kNegativeEigenTolerance * std::max(largest, 0.0);
  if (smallest < -tolerance) {
    throw std::domain_error(std::string(what) + ": matrix is not positive semi-definite (eigenvalue " +
                            std::to_string(smallest) + ", largest " + std::to_string(largest) + ")");
  }
}

// Sum of square roots of the (clamped) eigenvalues of a symmetric PSD matrix.
double trace_sqrt_symmetric(const Matrix& m, const char* what) {
  const Matrix sym = checked_symmetric_part(m, what);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error(std::string(what) + ": eigensolver failed");
  const Vector& ev = solver.eigenvalues();
  check_eigenvalues(ev, what);
  double total = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) total += std::sqrt(std::max(ev[k], 0.0));
  return total;
}

}  // namespace

GaussianSummary mean_and_cov(const RowMatrix& samples) {
  const Eigen::Index rows = samples.rows();
  const Eigen::Index dim = samples.cols();
  if (rows < 2) throw std::invalid_argument("mean_and_cov: need at least 2 samples");
  if (!samples.allFinite()) throw std::invalid_argument("mean_and_cov: non-finite sample entries");

  GaussianSummary out;
  out.n_samples = static_cast<std::size_t>(rows);
  out.mean = Vector::Zero(dim);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < dim; ++k) out.mean[k] += samples(i, k);
  }
  out.mean /= static_cast<double>(rows);

  RowMatrix centered = samples;
  centered.rowwise() -= out.mean.transpose();

  out.cov = Matrix::Zero(dim, dim);
  const double denom = static_cast<double>(rows - 1);
  // Each entry (a, b>=a) is summed over rows in ascending order, so the
  // result does not depend on how rows of the output are split over threads.
#pragma omp parallel for schedule(dynamic, 1)
  for (Eigen::Index a = 0; a < dim; ++a) {
    std::vector<double> acc(static_cast<std::size_t>(dim - a), 0.0);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double za = centered(i, a);
      const double* row = centered.data() + i * dim;
      for (Eigen::Index b = a; b < dim; ++b) acc[static_cast<std::size_t>(b - a)] += za * row[b];
    }
    for (Eigen::Index b = a; b < dim; ++b) {
      const double v = acc[static_cast<std::size_t>(b - a)] / denom;
      out.cov(a, b) = v;
      out.cov(b, a) = v;
    }
  }
  return out;
}

Matrix sqrtm_psd(const Matrix& m) {
  const Matrix sym = checked_symmetric_part(m, "sqrtm_psd");
  if (sym.size() == 0) return sym;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw std::runtime_error("sqrtm_psd: eigensolver failed");
  const Vector& ev = solver.eigenvalues();
  check_eigenvalues(ev, "sqrtm_psd");
  const Vector roots = ev.cwiseMax(0.0).cwiseSqrt();
  const Matrix& basis = solver.eigenvectors();
  Matrix root = basis * roots.asDiagonal() * basis.transpose();
  return 0.5 * (root + root.transpose());
}

double trace_sqrt_product(const Matrix& a, const Matrix& b) {
  require_square(b, "trace_sqrt_product");
  if (a.rows() != b.rows()) throw std::invalid_argument("trace_sqrt_product: dimension mismatch");
  checked_symmetric_part(b, "trace_sqrt_product");
  const Matrix root = sqrtm_psd(a);
  return trace_sqrt_symmetric(root * b * root, "trace_sqrt_product");
}

RegularizedCovariance regularize_covariance(const Matrix& cov) {
  const Matrix sym = checked_symmetric_part(cov, "regularize_covariance");
  RegularizedCovariance out{cov, 0.0};
  if (sym.size() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("regularize_covariance: eigensolver failed");
  const double largest = solver.eigenvalues().maxCoeff();
  const double smallest = solver.eigenvalues().minCoeff();
  if (largest > 0.0 && smallest < kRegularizeThreshold * largest) {
    out.epsilon = kRegularizeScale * largest;
    out.cov.diagonal().array() += out.epsilon;
  }
  return out;
}

PreparedGaussian prepare_gaussian(const GaussianSummary& g) {
  if (g.cov.rows() != g.dim() || g.cov.cols() != g.dim()) {
    throw std::invalid_argument("prepare_gaussian: covariance shape does not match mean");
  }
  auto reg = regularize_covariance(g.cov);
  PreparedGaussian out;
  out.mean = g.mean;
  out.cov = std::move(reg.cov);
  out.epsilon = reg.epsilon;
  out.cov_sqrt = sqrtm_psd(out.cov);
  out.trace = out.cov.trace();
  return out;
}

FrechetTerms frechet_terms(const GaussianSummary& first, const PreparedGaussian& second) {
  if (first.dim() != second.mean.size() || first.cov.rows() != first.dim() ||
      first.cov.cols() != first.dim()) {
    throw std::invalid_argument("frechet: dimension mismatch (" + std::to_string(first.dim()) + " vs " +
                                std::to_string(second.mean.size()) + ")");
  }
  const auto reg = regularize_covariance(first.cov);

  FrechetTerms t;
  t.epsilon_first = reg.epsilon;
  t.epsilon_second = second.epsilon;
  const double first_trace = reg.cov.trace();
  t.trace_term = first_trace + second.trace;

  if (first.mean == second.mean && reg.cov == second.cov) {
    // Identical Gaussians: tr((S S)^1/2) = tr(S) exactly.
    t.mean_term = 0.0;
    t.cross_term = first_trace;
  } else {
    t.mean_term = (first.mean - second.mean).squaredNorm();
    const Matrix inner = second.cov_sqrt * reg.cov * second.cov_sqrt;
    t.cross_term = trace_sqrt_symmetric(inner, "frechet");
  }
  t.value = t.mean_term + t.trace_term - 2.0 * t.cross_term;
  if (t.value < 0.0) {
    t.value = 0.0;
    t.clamped = true;
  }
  return t;
}

FrechetTerms frechet_terms(const GaussianSummary& first, const GaussianSummary& second) {
  return frechet_terms(first, prepare_gaussian(second));
}

double frechet_gaussian(const GaussianSummary& first, const GaussianSummary& second) {
  return frechet_terms(first, second).value;
}

}  // namespace fidtrust
