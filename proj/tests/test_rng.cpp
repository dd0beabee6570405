#include "fidtrust/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace fidtrust;

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("stream words follow the block layout") {
  CounterRng rng(0, 0);
  CHECK(rng.next_u32() == 0x6627e8d5);
  CHECK(rng.next_u32() == 0xe169c58d);
  CHECK(rng.next_u64() == ((std::uint64_t{0xbc57ac4c} << 32) | 0x9b00dbd8));
  const auto block1 = philox4x32({1, 0, 0, 0}, {0, 0});
  CHECK(rng.next_u32() == block1[0]);

  CounterRng other(0x0000000500000007ULL, 0x0000000900000003ULL);
  const auto b0 = philox4x32({0, 0, 3, 9}, {7, 5});
  CHECK(other.next_u32() == b0[0]);
}

TEST_CASE("uniform, index and normal draws") {
  CounterRng rng(99, 1);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const std::uint64_t k = rng.uniform_index(7);
    REQUIRE(k < 7);
    const double z = rng.normal();
    REQUIRE(std::isfinite(z));
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("same coordinates give the same draws") {
  CounterRng a(123, 4), b(123, 4), c(123, 5);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }
}

TEST_CASE("derived seeds are distinct and stable") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 1000; ++t) seen.insert(derive_seed(42, t));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(42, "weights") == derive_seed(42, fnv1a64("weights")));
  CHECK(derive_seed(42, "weights") != derive_seed(43, "weights"));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
