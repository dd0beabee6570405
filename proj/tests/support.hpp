#pragma once

#include "fidtrust/embeddings.hpp"
#include "fidtrust/image.hpp"
#include "fidtrust/linalg.hpp"
#include "fidtrust/rng.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace support {

using namespace fidtrust;

inline RowMatrix random_rows(std::size_t n, std::size_t k, std::uint64_t seed, double scale = 1.0) {
  CounterRng rng(seed, 11);
  RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  return m;
}

/// Q diag(lambda) Q^T with log-uniform eigenvalues in [1/cond, 1].
inline Matrix random_spd(std::size_t k, double cond, std::uint64_t seed) {
  CounterRng rng(seed, 12);
  Matrix g(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  Vector lambda(static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double t = k == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(k - 1);
    lambda[i] = std::pow(cond, -t);
  }
  Matrix a = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

inline StochasticEmbeddingSet random_tensor(std::size_t I, std::size_t J, std::size_t K, std::uint64_t seed) {
  CounterRng rng(seed, 13);
  std::vector<double> v(I * J * K);
  for (double& x : v) x = rng.normal();
  return StochasticEmbeddingSet(I, J, K, std::move(v));
}

inline ImageTensor random_image(std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed) {
  CounterRng rng(seed, 14);
  ImageTensor img(h, w, c, ValueRange{0.0, 1.0});
  for (double& v : img.pixels()) v = rng.uniform();
  return img;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fidtrust_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support
