#include "fidtrust/image_io.hpp"
#include "fidtrust/npy.hpp"
#include "fidtrust/result_table.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace fs = std::filesystem;
using namespace fidtrust;

namespace {

struct Output {
  int status = 0;
  std::string out;
  std::string err;
};

Output run(const std::string& args, const fs::path& cwd = fs::temp_directory_path()) {
  static int counter = 0;
  const fs::path base = fs::temp_directory_path() / ("fidtrust_cli_" + std::to_string(counter++));
  const std::string cmd = "cd '" + cwd.string() + "' && '" FIDTRUST_CLI "' " + args + " > '" + base.string() +
                          ".out' 2> '" + base.string() + ".err'";
  const int rc = std::system(cmd.c_str());
  Output o;
  o.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  o.out = support::read_file(base.string() + ".out");
  o.err = support::read_file(base.string() + ".err");
  return o;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

double metric(const std::string& csv, const std::string& name) {
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    const auto cells = split_csv_line(line);
    if (cells.size() == 2 && cells[0] == name) return std::stod(cells[1]);
  }
  FAIL("metric " << name << " missing");
  return 0.0;
}

void write_matrix(const fs::path& p, std::vector<std::size_t> shape, std::vector<double> v) {
  NpyArray a;
  a.shape = std::move(shape);
  a.data = std::move(v);
  write_npy(p, a);
}

}  // namespace

TEST_CASE("help output is stable") {
  for (const std::string sub : {"", "embed", "fid", "knn", "augment", "experiment", "report"}) {
    CAPTURE(sub);
    const Output o = run(sub + " --help");
    CHECK(o.status == 0);
    const fs::path snap = fs::path(FIDTRUST_SNAPSHOTS) / ((sub.empty() ? "main" : sub) + ".txt");
    CHECK(o.out == support::read_file(snap));
  }
}

TEST_CASE("embed writes the documented shape and is reproducible") {
  const auto dir = support::temp_dir("cli_embed");
  const Output a = run("--seed 3 --out " + q(dir / "a.npy") + " embed --synthetic mixed:8 --mcd 4");
  REQUIRE(a.status == 0);
  CHECK(read_npy(dir / "a.npy").shape == std::vector<std::size_t>{8, 4, 64});
  REQUIRE(run("--seed 3 --out " + q(dir / "b.npy") + " embed --synthetic mixed:8 --mcd 4").status == 0);
  CHECK(support::read_file(dir / "a.npy") == support::read_file(dir / "b.npy"));
  REQUIRE(run("--seed 3 --threads 1 --out " + q(dir / "c.npy") + " embed --synthetic mixed:8 --mcd 4").status == 0);
  CHECK(support::read_file(dir / "a.npy") == support::read_file(dir / "c.npy"));

  REQUIRE(run("--seed 3 --out " + q(dir / "d.npy") + " embed --synthetic mixed:8 --dtype f4").status == 0);
  const NpyArray d = read_npy(dir / "d.npy");
  CHECK(d.shape == std::vector<std::size_t>{8, 64});
  CHECK(d.dtype == NpyDtype::f4);

  const Output unseeded = run("--out " + q(dir / "e.npy") + " embed --synthetic mixed:4");
  CHECK(unseeded.status == 0);
  CHECK(unseeded.err.rfind("seed: ", 0) == 0);
}

TEST_CASE("input errors exit nonzero with a message") {
  const auto empty = support::temp_dir("cli_empty");
  const Output o = run("--seed 1 --out " + q(empty / "x.npy") + " embed --images " + q(empty));
  CHECK(o.status != 0);
  CHECK(o.err.rfind("error: ", 0) == 0);
  CHECK(run("--seed 1 fid --test " + q(empty / "none.npy") + " --reference " + q(empty / "none.npy")).status != 0);
  CHECK(run("experiment bogus").status != 0);
  CHECK(run("").status != 0);
}

TEST_CASE("fid closed forms") {
  const auto dir = support::temp_dir("cli_fid");
  write_matrix(dir / "ref.npy", {2, 1}, {0.0, 2.0});
  write_matrix(dir / "test.npy", {3, 1}, {3.0, 5.0, 7.0});
  const Output o = run("fid --test " + q(dir / "test.npy") + " --reference " + q(dir / "ref.npy"));
  REQUIRE(o.status == 0);
  CHECK(metric(o.out, "fid") == doctest::Approx(22.0 - 4.0 * std::sqrt(2.0)).epsilon(1e-12));

  const Output same = run("fid --test " + q(dir / "ref.npy") + " --reference " + q(dir / "ref.npy"));
  CHECK(metric(same.out, "fid") == 0.0);

  REQUIRE(run("--seed 5 --out " + q(dir / "t3.npy") + " embed --synthetic mixed:12 --mcd 3").status == 0);
  REQUIRE(run("--seed 5 --out " + q(dir / "r2.npy") + " embed --synthetic blobs:12").status == 0);
  const Output dist = run("--format json fid --test " + q(dir / "t3.npy") + " --reference " + q(dir / "r2.npy") +
                          " --decomposition " + q(dir / "terms.csv"));
  REQUIRE(dist.status == 0);
  CHECK(dist.out.find("\"sigma_fid\"") != std::string::npos);
  const std::string terms = support::read_file(dir / "terms.csv");
  CHECK(terms.rfind("j,fid,a,b,c,epsilon\n", 0) == 0);
  CHECK(std::count(terms.begin(), terms.end(), '\n') == 4);
}

TEST_CASE("knn on orthonormal rows") {
  const auto dir = support::temp_dir("cli_knn");
  std::vector<double> ref(5 * 6, 0.0);
  for (std::size_t i = 0; i < 5; ++i) ref[i * 6 + i + 1] = 2.0;
  write_matrix(dir / "ref.npy", {5, 6}, ref);
  write_matrix(dir / "test.npy", {1, 6}, {3.0, 0, 0, 0, 0, 0});
  const Output o = run("knn --test " + q(dir / "test.npy") + " --reference " + q(dir / "ref.npy"));
  REQUIRE(o.status == 0);
  CHECK(metric(o.out, "knn") == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(run("knn -k 6 --test " + q(dir / "test.npy") + " --reference " + q(dir / "ref.npy")).status != 0);
}

TEST_CASE("augment writes one image per input") {
  const auto dir = support::temp_dir("cli_augment");
  fs::create_directories(dir / "in");
  for (int i = 0; i < 3; ++i) save_image(dir / "in" / ("img" + std::to_string(i) + ".ppm"), support::random_image(16, 16, 3, i));
  const std::string args = "--seed 2 --out " + q(dir / "out") + " augment --images " + q(dir / "in");
  REQUIRE(run(args + " --strength 10 --clip").status == 0);
  for (int i = 0; i < 3; ++i) {
    const std::string name = "img" + std::to_string(i) + ".ppm";
    CHECK(load_image(dir / "out" / name) != load_image(dir / "in" / name));
  }
  REQUIRE(run("--seed 2 --out " + q(dir / "ov") + " augment --kind overlay --patches 2 --images " + q(dir / "in")).status == 0);
  CHECK(fs::exists(dir / "ov" / "img2.ppm"));
  CHECK(run(args + " --kind blur").status != 0);
}

TEST_CASE("experiment outputs") {
  const auto dir = support::temp_dir("cli_experiment");
  const std::string args = "--seed 9 --out out experiment sensitivity --data mixed:16 -J 3 --strengths 0,50";
  const Output o = run(args, dir);
  REQUIRE(o.status == 0);
  CHECK(o.out == support::read_file(dir / "out" / "results.csv"));
  CHECK(fs::exists(dir / "out" / "fid.svg"));
  CHECK(fs::exists(dir / "out" / "sigma_fid.svg"));
  CHECK(fs::exists(dir / "out" / "pvar.svg"));
  const std::string manifest = support::read_file(dir / "out" / "manifest.json");
  CHECK(manifest.find("\"seed\": 9") != std::string::npos);
  CHECK(manifest.find("\"results.csv\"") != std::string::npos);

  const Output rep = run("--out rep report --results out/results.csv --charts mae,ms_ssim", dir);
  REQUIRE(rep.status == 0);
  CHECK(support::read_file(dir / "rep" / "results.csv") == o.out);
  CHECK(fs::exists(dir / "rep" / "ms_ssim.svg"));
}
