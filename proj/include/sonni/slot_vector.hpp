#pragma once

#include <cstdint>
#include <vector>

#include "sonni/util.hpp"

namespace sonni {

// Plaintext slot vector: the message space of the mock scheme.
using SlotVector = std::vector<double>;

// Canonical byte encoding shared by digests, check hashes, and the wire
// format: 4-byte little-endian slot count, then each slot as an 8-byte
// little-endian IEEE-754 double.
void encode_slots(std::vector<uint8_t>& out, const SlotVector& v);
std::vector<uint8_t> encode_slots(const SlotVector& v);
SlotVector decode_slots(ByteReader& r);

bool all_finite(const SlotVector& v);

// max |v_i| over the vector (0 for empty).
double max_abs(const SlotVector& v);

// max |a_i - b_i|; lengths must match.
double max_abs_diff(const SlotVector& a, const SlotVector& b);

SlotVector basis_vector(size_t n, size_t index);          // e_index
SlotVector complement_vector(size_t n, size_t index);     // 1 - e_index
SlotVector constant_vector(size_t n, double value);

}  // namespace sonni
