#include "fedbai/codec.hpp"

#include <cmath>

#include "fedbai/errors.hpp"

namespace fedbai {

int bit_precision(double alpha_val) {
  if (!(alpha_val > 0.0)) throw Error(ErrorCode::NonPositiveAlpha, "alpha must be positive");
  if (alpha_val >= 0.5) return 1;
  // Smallest B with 2^-B <= alpha. Computed by exact power-of-two comparison
  // so that exact powers (alpha = 0.25) do not round up.
  int b = static_cast<int>(std::ceil(-std::log2(alpha_val)));
  while (b > 1 && std::ldexp(1.0, -(b - 1)) <= alpha_val) --b;
  while (std::ldexp(1.0, -b) > alpha_val) ++b;
  if (b > kMaxBits) throw Error(ErrorCode::OutOfRange, "alpha needs more than 62 bits");
  return b;
}

QuantizedValue encode(double value, int bits) {
  if (!(value >= 0.0 && value <= 1.0))
    throw Error(ErrorCode::ValueOutOfRange, "value to encode must lie in [0,1]");
  if (bits < 1 || bits > kMaxBits) throw Error(ErrorCode::OutOfRange, "bits must be in 1..62");
  const std::uint64_t top = (std::uint64_t{1} << bits) - 1;
  const auto bin = static_cast<std::uint64_t>(std::floor(std::ldexp(value, bits)));
  return {bin > top ? top : bin, bits};
}

double decode(const QuantizedValue& q) {
  return std::ldexp(static_cast<double>(q.bin_index) + 0.5, -q.bits);
}

std::string to_bitstring(const QuantizedValue& q) {
  std::string s(static_cast<std::size_t>(q.bits), '0');
  for (int i = 0; i < q.bits; ++i)
    if ((q.bin_index >> (q.bits - 1 - i)) & 1U) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

QuantizedValue from_bitstring(const std::string& s) {
  if (s.empty() || s.size() > static_cast<std::size_t>(kMaxBits))
    throw Error(ErrorCode::OutOfRange, "bit string length must be in 1..62");
  QuantizedValue q{0, static_cast<int>(s.size())};
  for (char ch : s) {
    if (ch != '0' && ch != '1') throw Error(ErrorCode::OutOfRange, "bit string must be 0/1");
    q.bin_index = (q.bin_index << 1) | static_cast<std::uint64_t>(ch == '1');
  }
  return q;
}

}  // namespace fedbai
