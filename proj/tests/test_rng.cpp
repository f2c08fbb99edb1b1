#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "causaldr/rng.hpp"

using namespace causaldr;

// Known-answer vectors computed with an independent implementation of the
// published Philox4x32-10 round function.
TEST_CASE("philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;

  CHECK(rng::philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}) ==
        A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(rng::philox4x32_10(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                           A2{0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(rng::philox4x32_10(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                           A2{0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  CHECK(rng::philox4x32_10(A4{1, 0, 0, 0}, A2{42, 0}) ==
        A4{0xfcdb2127u, 0x53ba6cfdu, 0x838f5a6eu, 0x744e06fbu});
}

TEST_CASE("streams are deterministic and key-separated") {
  rng::Stream a(123), b(123), c(124);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    all_equal = all_equal && va == b.next_u64();
    any_diff = any_diff || va != c.next_u64();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("derive_key separates paths and orders") {
  const auto k1 = rng::derive_key(9, {1, 2});
  const auto k2 = rng::derive_key(9, {2, 1});
  const auto k3 = rng::derive_key(9, {1, 2, 0});
  CHECK(k1 != k2);
  CHECK(k1 != k3);
  CHECK(rng::derive_key(9, {1, 2}) == k1);
}

TEST_CASE("uniform doubles live in [0,1) with the right mean") {
  rng::Stream s(2024);
  const int n = 200000;
  double acc = 0.0, acc2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    acc += u;
    acc2 += u * u;
  }
  const double mean = acc / n;
  const double var = acc2 / n - mean * mean;
  // 3 sigma bounds: sd(mean) = sqrt(1/12/n) ~ 0.00065
  CHECK(std::abs(mean - 0.5) < 0.002);
  CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normals have unit variance and zero mean") {
  rng::Stream s(77);
  const int n = 200000;
  double acc = 0.0, acc2 = 0.0, acc4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.next_normal();
    acc += z;
    acc2 += z * z;
    acc4 += z * z * z * z;
  }
  CHECK(std::abs(acc / n) < 0.01);            // sd ~ 0.0022
  CHECK(std::abs(acc2 / n - 1.0) < 0.02);     // sd ~ 0.0032
  CHECK(std::abs(acc4 / n - 3.0) < 0.15);     // kurtosis of a normal
}

TEST_CASE("next_index covers the range uniformly") {
  rng::Stream s(5);
  std::vector<int> counts(10, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[s.next_index(10)];
  for (int c : counts) CHECK(std::abs(c - n / 10) < 600);  // ~6 sigma
}
