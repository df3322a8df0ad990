#include "sonni/slot_vector.hpp"

#include <algorithm>
#include <cmath>

namespace sonni {

void encode_slots(std::vector<uint8_t>& out, const SlotVector& v) {
  put_u32le(out, static_cast<uint32_t>(v.size()));
  for (double d : v) put_f64le(out, d);
}

std::vector<uint8_t> encode_slots(const SlotVector& v) {
  std::vector<uint8_t> out;
  out.reserve(4 + 8 * v.size());
  encode_slots(out, v);
  return out;
}

SlotVector decode_slots(ByteReader& r) {
  uint32_t n = r.u32le();
  SlotVector v(n);
  for (uint32_t i = 0; i < n; ++i) v[i] = r.f64le();
  return v;
}

bool all_finite(const SlotVector& v) {
  for (double d : v)
    if (!std::isfinite(d)) return false;
  return true;
}

double max_abs(const SlotVector& v) {
  double m = 0.0;
  for (double d : v) m = std::max(m, std::fabs(d));
  return m;
}

double max_abs_diff(const SlotVector& a, const SlotVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("max_abs_diff: length mismatch");
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

SlotVector basis_vector(size_t n, size_t index) {
  SlotVector v(n, 0.0);
  v.at(index) = 1.0;
  return v;
}

SlotVector complement_vector(size_t n, size_t index) {
  SlotVector v(n, 1.0);
  v.at(index) = 0.0;
  return v;
}

SlotVector constant_vector(size_t n, double value) { return SlotVector(n, value); }

}  // namespace sonni
