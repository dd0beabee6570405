// Acceptance runner: one PASS/FAIL line per criterion, tolerances fixed here.

#include "fidtrust/experiments.hpp"
#include "fidtrust/image_metrics.hpp"
#include "fidtrust/linalg.hpp"
#include "fidtrust/metrics.hpp"
#include "fidtrust/npy.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <sstream>

namespace fs = std::filesystem;
using namespace fidtrust;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* id, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %s  %s  (%.2f s, limit %.0f s%s)\n", id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs, limit_s,
              in_time ? "" : ", too slow");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

GaussianSummary gaussian(Vector mean, Matrix cov) {
  GaussianSummary g;
  g.mean = std::move(mean);
  g.cov = std::move(cov);
  g.n_samples = 1000;
  return g;
}

Outcome ac1() {
  CounterRng rng(1, 0);
  double worst1 = 0.0, worst2 = 0.0;
  for (int n = 0; n < 200; ++n) {
    const double m1 = 5 * rng.normal(), m2 = 5 * rng.normal();
    const double s1 = 0.1 + 3 * rng.uniform(), s2 = 0.1 + 3 * rng.uniform();
    const double got = frechet_gaussian(gaussian(Vector::Constant(1, m1), Matrix::Constant(1, 1, s1 * s1)),
                                        gaussian(Vector::Constant(1, m2), Matrix::Constant(1, 1, s2 * s2)));
    const double want = (m1 - m2) * (m1 - m2) + (s1 - s2) * (s1 - s2);
    worst1 = std::max(worst1, std::abs(got - want) / std::abs(want));
  }
  for (int n = 0; n < 200; ++n) {
    Vector m1(16), m2(16), l1(16), l2(16);
    double want = 0.0;
    for (int k = 0; k < 16; ++k) {
      m1[k] = rng.normal();
      m2[k] = rng.normal();
      l1[k] = 0.01 + 4 * rng.uniform();
      l2[k] = 0.01 + 4 * rng.uniform();
      want += (m1[k] - m2[k]) * (m1[k] - m2[k]) + std::pow(std::sqrt(l1[k]) - std::sqrt(l2[k]), 2);
    }
    const double got = frechet_gaussian(gaussian(m1, l1.asDiagonal().toDenseMatrix()),
                                        gaussian(m2, l2.asDiagonal().toDenseMatrix()));
    worst2 = std::max(worst2, std::abs(got - want) / std::abs(want));
  }
  return {worst1 <= 1e-10 && worst2 <= 1e-8, fmt("1-D worst rel %.2e (tol 1e-10), diagonal worst rel %.2e (tol 1e-8)",
                                                 worst1, worst2)};
}

Outcome ac2() {
  CounterRng rng(2, 0);
  const std::size_t sizes[3] = {8, 64, 256};
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const std::size_t k = sizes[n % 3];
    const double cond = std::pow(10.0, 8.0 * rng.uniform());
    const Matrix a = support::random_spd(k, n % 10 == 0 ? 1e8 : cond, 1000 + n);
    const Matrix r = sqrtm_psd(a);
    worst = std::max(worst, (r * r - a).norm() / a.norm());
  }
  return {worst <= 1e-6, fmt("worst relative Frobenius error %.2e (tol 1e-6)", worst)};
}

Outcome ac3() {
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const auto test = support::random_tensor(24, 20, 6, 3000 + n);
    RowMatrix ref = support::random_rows(40, 6, 5000 + n, 1.0 + 0.01 * (n % 50));
    const FidDistribution d = fid_samples(test, mean_and_cov(ref));
    const VfidDecomposition v = vfid_decomposition(d);
    std::vector<long double> f(20);
    long double mean = 0.0L;
    for (std::size_t j = 0; j < 20; ++j) {
      f[j] = static_cast<long double>(d.terms_a[j]) + d.terms_b[j] - 2.0L * d.terms_c[j];
      mean += f[j];
    }
    mean /= 20;
    long double var = 0.0L;
    for (const auto x : f) var += (x - mean) * (x - mean);
    var /= 19;
    worst = std::max(worst, static_cast<double>(std::abs(v.reconstructed_vfid - var) / var));
  }
  return {worst <= 1e-8, fmt("worst relative gap %.2e over 1000 fixtures (tol 1e-8)", worst)};
}

Outcome ac4() {
  CounterRng rng(4, 0);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const std::size_t I = 1 + rng.uniform_index(16), J = 2 + rng.uniform_index(19), K = 1 + rng.uniform_index(32);
    const auto t = support::random_tensor(I, J, K, 7000 + n);
    worst = std::max(worst, std::abs(pvar(t) - oracle::oracle_pvar(t)));
  }
  return {worst <= 1e-12, fmt("worst absolute gap %.2e (tol 1e-12)", worst)};
}

Outcome ac5() {
  int fid_ok = 0, sigma_ok = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ExperimentConfig c;
    c.kind = ExperimentKind::equal_augmentation;
    c.data = DataSource::parse("mixed:512");
    c.strengths = {5, 20, 50, 100};
    c.J = 20;
    c.seed = seed;
    const ResultTable t = run_equal_augmentation(c);
    fid_ok += t.value(3, "fid") < t.value(0, "fid");
    sigma_ok += t.value(3, "sigma_fid") < t.value(0, "sigma_fid");
  }
  return {fid_ok >= 9 && sigma_ok >= 9, fmt("FID(100)<FID(5) in %.0f/10, sigma in %.0f/10 (need 9)", fid_ok, sigma_ok)};
}

Outcome ac6() {
  int knn_ok = 0, sigma_ok = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ExperimentConfig c;
    c.kind = ExperimentKind::ood_table;
    c.reference = DataSource::parse("mixed:256");
    c.tests = {DataSource::parse("mixed:256:0.1"), DataSource::parse("mixed:256:0.3"),
               DataSource::parse("mixed:256:1")};
    c.J = 20;
    c.seed = seed;
    const ResultTable t = run_ood_table(c);
    const auto knn = t.column("knn");
    const auto sigma = t.column("sigma_fid");
    knn_ok += knn[0] < knn[1] && knn[1] < knn[2];
    sigma_ok += sigma[0] <= sigma[1] && sigma[1] <= sigma[2];
  }
  return {knn_ok == 10 && sigma_ok >= 8,
          fmt("kNN strictly increasing %.0f/10 (need 10), sigma non-decreasing %.0f/10 (need 8)", knn_ok, sigma_ok)};
}

Outcome ac7() {
  ExperimentConfig c;
  c.kind = ExperimentKind::fixed_test;
  c.seed = 7;
  const ResultTable t = run_fixed_test_sweep(c);
  const auto p = t.column("pvar");
  double spread = 0.0;
  for (const double v : p) spread = std::max(spread, std::abs(v - p[0]));
  return {spread <= 1e-12, fmt("max pVar deviation %.2e over %.0f strengths (tol 1e-12)", spread,
                               static_cast<double>(p.size()))};
}

Outcome ac8() {
  double self = 0.0, oracle_gap = 0.0, axioms = 0.0;
  for (int n = 0; n < 20; ++n) {
    const auto a = support::random_image(48, 48, n % 2 ? 3 : 1, 100 + n);
    self = std::max(self, std::abs(ms_ssim(a, a, {3}) - 1.0));
  }
  for (int n = 0; n < 20; ++n) {
    const auto a = support::random_image(48, 48, 1, 200 + n);
    ImageTensor b = a;
    CounterRng rng(300 + n, 0);
    const double sd = 0.02 * (1 + n);
    for (double& v : b.pixels()) v += sd * rng.normal();
    oracle_gap = std::max(oracle_gap, std::abs(ms_ssim(a, b, {3}) - oracle::oracle_ms_ssim(a, b, 3)));
  }
  for (int n = 0; n < 100; ++n) {
    const auto x = support::random_image(8, 8, 3, 400 + n);
    const auto y = support::random_image(8, 8, 3, 500 + n);
    const auto z = support::random_image(8, 8, 3, 600 + n);
    axioms = std::max({axioms, std::abs(mae(x, x)), std::abs(mae(x, y) - mae(y, x)),
                       std::max(0.0, mae(x, z) - mae(x, y) - mae(y, z)), std::max(0.0, -mae(x, y))});
  }
  std::ostringstream os;
  char buf[200];
  std::snprintf(buf, sizeof buf, "self %.2e (tol 1e-9), oracle %.2e (tol 1e-6), MAE axioms %.2e (tol 1e-12)", self,
                oracle_gap, axioms);
  return {self <= 1e-9 && oracle_gap <= 1e-6 && axioms <= 1e-12, buf};
}

int run_cli(const std::string& args, const fs::path& cwd) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" FIDTRUST_CLI "' " + args + " > stdout.txt 2> stderr.txt";
  return std::system(cmd.c_str());
}

Outcome ac9() {
  const std::vector<std::string> runs = {
      "--seed 11 --out out experiment equal-aug --data mixed:128 -J 10",
      "--seed 12 --out out experiment ood-table --reference mixed:64 --test mixed:64:0.1 --test mixed:64:1 -J 10",
      "--seed 13 --out out experiment sensitivity --data mixed:64 -J 10",
      "--seed 14 --format json --out out experiment fixed-test --data mixed:64 -J 10 --charts fid,pvar,v_fid"};
  std::size_t compared = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const fs::path a = support::temp_dir("acc9_a" + std::to_string(r));
    const fs::path b = support::temp_dir("acc9_b" + std::to_string(r));
    if (run_cli(runs[r], a) != 0 || run_cli(runs[r], b) != 0) return {false, "cli failed: " + runs[r]};
    for (const auto& entry : fs::directory_iterator(a / "out")) {
      const fs::path other = b / "out" / entry.path().filename();
      if (!fs::exists(other) || support::read_file(entry.path()) != support::read_file(other)) {
        return {false, "differs: " + entry.path().filename().string() + " in '" + runs[r] + "'"};
      }
      ++compared;
    }
    if (support::read_file(a / "stdout.txt") != support::read_file(b / "stdout.txt")) {
      return {false, "stdout differs in '" + runs[r] + "'"};
    }
  }
  return {compared >= 16, fmt("%.0f output files byte-identical across %.0f repeated invocations",
                              static_cast<double>(compared), static_cast<double>(runs.size()))};
}

bool same_bits(double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0; }

Outcome ac10() {
  const fs::path dir = support::temp_dir("acc10");
  CounterRng rng(10, 0);
  int ok = 0;
  for (int n = 0; n < 50; ++n) {
    NpyArray a;
    a.dtype = n % 2 ? NpyDtype::f4 : NpyDtype::f8;
    a.shape = {1 + rng.uniform_index(9), 1 + rng.uniform_index(9)};
    if (n % 4 >= 2) a.shape.push_back(1 + rng.uniform_index(9));
    a.data.resize(a.count());
    for (double& v : a.data) {
      v = std::ldexp(rng.normal(), static_cast<int>(rng.uniform_index(40)) - 20);
      if (a.dtype == NpyDtype::f4) v = static_cast<float>(v);
    }
    const fs::path p = dir / ("a" + std::to_string(n) + ".npy");
    write_npy(p, a);
    const NpyArray b = read_npy(p);
    bool same = b.shape == a.shape && b.dtype == a.dtype && b.data.size() == a.data.size();
    for (std::size_t e = 0; same && e < a.data.size(); ++e) same = same_bits(a.data[e], b.data[e]);
    ok += same;
  }
  const NpyArray f = read_npy(fs::path(FIDTRUST_FIXTURES) / "numpy_f8_2d.npy");
  bool fixture = f.shape == std::vector<std::size_t>{4, 6};
  for (int i = 0; fixture && i < 24; ++i) {
    const double want = i == 0 ? -0.0 : i == 23 ? 1e-300 : static_cast<double>(i - 12) / 3.0;
    fixture = same_bits(f.data[i], want);
  }
  const NpyArray g = read_npy(fs::path(FIDTRUST_FIXTURES) / "numpy_f4_3d.npy");
  for (int i = 0; fixture && i < 30; ++i) fixture = g.data[i] == static_cast<double>(i / 8.0f - 1.5f);
  return {ok == 50 && fixture, fmt("%.0f/50 arrays bitwise, numpy fixtures ", ok) +
                                   (fixture ? "identical" : "DIFFER")};
}

}  // namespace

int main() {
  report("AC1", 5, ac1);
  report("AC2", 30, ac2);
  report("AC3", 5, ac3);
  report("AC4", 5, ac4);
  report("AC5", 120, ac5);
  report("AC6", 120, ac6);
  report("AC7", 60, ac7);
  report("AC8", 30, ac8);
  report("AC9", 120, ac9);
  report("AC10", 10, ac10);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
