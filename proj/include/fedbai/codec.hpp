#pragma once

#include <cstdint>
#include <string>

namespace fedbai {

// A value in [0,1] quantized into one of 2^bits equal bins.
struct QuantizedValue {
  std::uint64_t bin_index = 0;
  int bits = 1;

  friend bool operator==(const QuantizedValue&, const QuantizedValue&) = default;
};

inline constexpr int kMaxBits = 62;

// ceil(log2(1/alpha)), never below 1. Throws NonPositiveAlpha for alpha <= 0,
// OutOfRange if more than kMaxBits would be needed.
int bit_precision(double alpha_val);

// Bin min(floor(v * 2^bits), 2^bits - 1). Throws ValueOutOfRange for v outside [0,1].
QuantizedValue encode(double value, int bits);

// Center of the bin.
double decode(const QuantizedValue& q);

// The bin index as exactly `bits` characters, most significant bit first.
std::string to_bitstring(const QuantizedValue& q);
QuantizedValue from_bitstring(const std::string& s);

}  // namespace fedbai
