#include "fidtrust/metrics.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

using namespace fidtrust;
using support::random_rows;
using support::random_tensor;

using namespace oracle;

namespace {

double var_direct(const std::vector<double>& x) {
  double m = 0.0;
  for (const double v : x) m += v;
  m /= static_cast<double>(x.size());
  double acc = 0.0;
  for (const double v : x) acc += (v - m) * (v - m);
  return acc / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST_CASE("pvar matches a brute-force double loop") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto t = random_tensor(1 + s % 9, 2 + s % 7, 1 + s % 13, s);
    CHECK(std::abs(pvar(t) - oracle_pvar(t)) <= 1e-12 * std::max(1.0, oracle_pvar(t)));
  }
}

TEST_CASE("pvar of identical evaluations is zero") {
  StochasticEmbeddingSet t(3, 4, 2);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 2; ++k) t.at(i, j, k) = static_cast<double>(i * 10 + k) + 0.1;
  CHECK(pvar(t) == 0.0);
  CHECK_THROWS_AS(pvar(StochasticEmbeddingSet(3, 1, 2)), std::invalid_argument);
}

TEST_CASE("fid_samples evaluates each slice against the reference") {
  const auto t = random_tensor(30, 6, 5, 1);
  const GaussianSummary ref = mean_and_cov(random_rows(40, 5, 2));
  const FidDistribution d = fid_samples(t, ref);
  REQUIRE(d.fid_samples.size() == 6);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(d.fid_samples[j] == frechet_gaussian(mean_and_cov(t.slice(j).matrix()), ref));
    CHECK(d.fid_samples[j] == doctest::Approx(d.terms_a[j] + d.terms_b[j] - 2.0 * d.terms_c[j]).epsilon(1e-12));
  }
  CHECK(d.v_fid == doctest::Approx(var_direct(d.fid_samples)).epsilon(1e-12));
  CHECK(d.sigma_fid == doctest::Approx(std::sqrt(d.v_fid)).epsilon(1e-15));

  CHECK_THROWS_AS(fid_samples(random_tensor(30, 6, 4, 1), ref), std::invalid_argument);
  CHECK_THROWS_AS(fid_samples(random_tensor(1, 6, 5, 1), ref), std::invalid_argument);
}

TEST_CASE("identical slices give zero spread") {
  const RowMatrix rows = random_rows(20, 4, 3);
  std::vector<EmbeddingSet> passes(5, EmbeddingSet(rows));
  const auto t = StochasticEmbeddingSet::stack(passes);
  const FidDistribution d = fid_samples(t, mean_and_cov(random_rows(20, 4, 4)));
  CHECK(d.v_fid == 0.0);
  CHECK(d.sigma_fid == 0.0);
  CHECK(pvar(t) == 0.0);
  const FidStats s = fid_stats(std::vector<double>(20, 0.1));
  CHECK(s.mean == 0.1);
  CHECK(s.variance == 0.0);
}

TEST_CASE("variance decomposition reconstructs vFID") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    CounterRng rng(s, 0);
    FidDistribution d;
    for (int j = 0; j < 20; ++j) {
      d.terms_a.push_back(rng.uniform());
      d.terms_b.push_back(10.0 + rng.normal());
      d.terms_c.push_back(4.0 + 0.5 * rng.normal());
      d.fid_samples.push_back(d.terms_a.back() + d.terms_b.back() - 2.0 * d.terms_c.back());
    }
    const FidStats st = fid_stats(d.fid_samples);
    d.v_fid = st.variance;
    const VfidDecomposition v = vfid_decomposition(d);
    CHECK(std::abs(v.reconstructed_vfid - st.variance) <= 1e-10 * st.variance);
    CHECK(v.var_a == doctest::Approx(var_direct(d.terms_a)).epsilon(1e-12));
  }
}

TEST_CASE("knn: trivial fixtures") {
  SUBCASE("orthonormal rows are sqrt(2) apart") {
    RowMatrix test = RowMatrix::Zero(2, 12);
    RowMatrix ref = RowMatrix::Zero(10, 12);
    test(0, 0) = 1.0;
    test(1, 1) = 3.0;
    for (int m = 0; m < 10; ++m) ref(m, m + 2) = 1.0 + m;
    CHECK(knn_ood_score(EmbeddingSet(test), EmbeddingSet(ref), 5) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  }
  SUBCASE("rows repeated k times give zero") {
    const RowMatrix base = random_rows(4, 6, 1);
    RowMatrix ref(20, 6);
    for (int r = 0; r < 20; ++r) ref.row(r) = base.row(r % 4);
    CHECK(knn_ood_score(EmbeddingSet(base), EmbeddingSet(ref), 5) == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("knn matches a brute-force oracle and ignores row scaling") {
  const RowMatrix test = random_rows(25, 8, 5), ref = random_rows(60, 8, 6);
  const double got = knn_ood_score(EmbeddingSet(test), EmbeddingSet(ref), 5);
  CHECK(got == doctest::Approx(oracle_knn(test, ref, 5)).epsilon(1e-13));
  RowMatrix scaled = test;
  for (Eigen::Index i = 0; i < scaled.rows(); ++i) scaled.row(i) *= 0.5 + static_cast<double>(i);
  CHECK(std::abs(knn_ood_score(EmbeddingSet(scaled), EmbeddingSet(ref), 5) - got) <= 1e-12);
  CHECK_THROWS_AS(knn_ood_score(EmbeddingSet(test), EmbeddingSet(random_rows(3, 8, 1)), 5), std::invalid_argument);
  CHECK_THROWS_AS(knn_ood_score(EmbeddingSet(test), EmbeddingSet(random_rows(9, 7, 1)), 5), std::invalid_argument);
  CHECK_THROWS_AS(knn_ood_score(EmbeddingSet(RowMatrix::Zero(1, 8)), EmbeddingSet(ref), 5), std::invalid_argument);
}

TEST_CASE("embedding diagnostics") {
  StochasticEmbeddingSet t(2, 2, 2);
  t.at(0, 0, 0) = 3.0;
  t.at(0, 0, 1) = 4.0;  // norm 5
  t.at(0, 1, 0) = 0.0;
  t.at(0, 1, 1) = 1.0;  // 1
  t.at(1, 0, 0) = 6.0;
  t.at(1, 0, 1) = 8.0;  // 10
  t.at(1, 1, 0) = 0.0;
  t.at(1, 1, 1) = 0.0;  // 0
  CHECK(mean_embedding_norm(t) == doctest::Approx(4.0));
  const std::vector<double> ref = {0.0, 0.0};
  const MeanTermDiagnostics m = mean_term_diagnostics(t, ref);
  // per-j means: j0 = (4.5, 6), j1 = (0, 0.5); mean over j = (2.25, 3.25)
  CHECK(m.mean_term == doctest::Approx(2.25 * 2.25 + 3.25 * 3.25));
  const double sd0 = std::sqrt(2.0 * 2.25 * 2.25), sd1 = std::sqrt(2.0 * 2.75 * 2.75);
  CHECK(m.mean_std == doctest::Approx((sd0 + sd1) / 2.0));
}
