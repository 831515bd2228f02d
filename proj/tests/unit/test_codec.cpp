#include <doctest.h>

#include <cmath>

#include "fedbai/codec.hpp"
#include "fedbai/errors.hpp"
#include "fedbai/rng.hpp"

using namespace fedbai;

TEST_CASE("bit precision") {
  CHECK(bit_precision(0.25) == 2);
  CHECK(bit_precision(0.3) == 2);
  CHECK(bit_precision(2.25) == 1);
  CHECK(bit_precision(0.5) == 1);
  CHECK(bit_precision(0.125) == 3);
  CHECK(bit_precision(0.01) == 7);
  CHECK_THROWS_AS(bit_precision(0.0), Error);
  CHECK_THROWS_AS(bit_precision(-1.0), Error);
}

TEST_CASE("encode and decode") {
  CHECK(encode(0.6, 2).bin_index == 2);
  CHECK(encode(1.0, 2).bin_index == 3);
  CHECK(encode(0.0, 5).bin_index == 0);
  CHECK(decode({2, 2}) == 0.625);
  CHECK(decode({0, 1}) == 0.25);
  CHECK(std::abs(decode(encode(0.6, bit_precision(0.25))) - 0.6) == doctest::Approx(0.025));
  CHECK_THROWS_AS(encode(1.2, 3), Error);
  CHECK_THROWS_AS(encode(-0.1, 3), Error);
}

TEST_CASE("bit strings") {
  CHECK(to_bitstring({5, 4}) == "0101");
  CHECK(from_bitstring("0101") == QuantizedValue{5, 4});
  CHECK(from_bitstring(to_bitstring({123456789, 40})) == QuantizedValue{123456789, 40});
}

TEST_CASE("quantization error stays within half the radius") {
  Xoshiro256 g(2024);
  int violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const double v = g.uniform();
    const double a = std::ldexp(1.0, -static_cast<int>(g.below(40))) * (0.5 + 0.5 * g.uniform());
    if (std::abs(decode(encode(v, bit_precision(a))) - v) > a / 2) ++violations;
  }
  CHECK(violations == 0);
}
