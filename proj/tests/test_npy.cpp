#include "fidtrust/npy.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace fidtrust;

namespace {

const std::filesystem::path kFixtures = FIDTRUST_FIXTURES;

std::vector<char> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("files written by numpy load with identical values") {
  const NpyArray a = read_npy(kFixtures / "numpy_f8_2d.npy");
  REQUIRE(a.shape == std::vector<std::size_t>{4, 6});
  CHECK(a.dtype == NpyDtype::f8);
  for (int i = 0; i < 24; ++i) {
    double want = static_cast<double>(i - 12) / 3.0;
    if (i == 0) want = -0.0;
    if (i == 23) want = 1e-300;
    CHECK(same_bits(a.data[i], want));
  }

  const NpyArray b = read_npy(kFixtures / "numpy_f4_3d.npy");
  REQUIRE(b.shape == std::vector<std::size_t>{2, 3, 5});
  CHECK(b.dtype == NpyDtype::f4);
  for (int i = 0; i < 30; ++i) CHECK(b.data[i] == static_cast<float>(i) / 8.0f - 1.5f);

  const NpyArray v2 = read_npy(kFixtures / "numpy_f8_v2.npy");
  CHECK(v2.shape == a.shape);
  CHECK(v2.data == a.data);

  const NpyArray u = read_npy(kFixtures / "numpy_u1_image.npy");
  CHECK(u.dtype == NpyDtype::u1);
  CHECK(u.data[5] == 35.0);
}

TEST_CASE("our encoding matches numpy's bytes") {
  for (const char* name : {"numpy_f8_2d.npy", "numpy_f4_3d.npy", "numpy_u1_image.npy"}) {
    const std::string file = support::read_file(kFixtures / name);
    const NpyArray arr = read_npy(kFixtures / name);
    CHECK(encode_npy(arr) == bytes_of(file));
  }
}

TEST_CASE("unsupported layouts are rejected") {
  CHECK_THROWS_AS(read_npy(kFixtures / "numpy_fortran.npy"), NpyError);
  CHECK_THROWS_AS(read_npy(kFixtures / "numpy_big_endian.npy"), NpyError);
  CHECK_THROWS_AS(read_npy(kFixtures / "missing.npy"), NpyError);
  CHECK_THROWS_AS(decode_npy(bytes_of("not an npy file at all")), NpyError);

  std::vector<char> truncated = encode_npy(read_npy(kFixtures / "numpy_f8_2d.npy"));
  truncated.resize(truncated.size() - 8);
  CHECK_THROWS_AS(decode_npy(truncated), NpyError);
}

TEST_CASE("save and load round-trip bitwise") {
  const auto dir = support::temp_dir("npy");
  for (std::uint64_t s = 0; s < 10; ++s) {
    CounterRng rng(s, 0);
    NpyArray arr;
    arr.dtype = s % 2 ? NpyDtype::f4 : NpyDtype::f8;
    arr.shape = s % 3 ? std::vector<std::size_t>{3, 4} : std::vector<std::size_t>{2, 3, 4};
    for (std::size_t i = 0; i < arr.count(); ++i) {
      const double v = rng.normal() * 1e3;
      arr.data.push_back(arr.dtype == NpyDtype::f4 ? static_cast<double>(static_cast<float>(v)) : v);
    }
    write_npy(dir / "a.npy", arr);
    const NpyArray back = read_npy(dir / "a.npy");
    CHECK(back.shape == arr.shape);
    CHECK(back.dtype == arr.dtype);
    CHECK(std::memcmp(back.data.data(), arr.data.data(), arr.data.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("header layout") {
  const std::vector<std::size_t> one = {7};
  const std::string h = npy_header(NpyDtype::f8, one);
  CHECK(h.find("'shape': (7,)") != std::string::npos);
  CHECK((h.size() + 10) % 64 == 0);
  CHECK(h.back() == '\n');
}
