#include "sonni/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace sonni {

Digest32 MockCiphertext::digest() const {
  std::vector<uint8_t> buf;
  buf.reserve(4 + 8 * payload.size() + 2 + keyset.size() + 8);
  encode_slots(buf, payload);
  keyset.encode(buf);
  put_u64le(buf, tag);
  return sha256(buf);
}

Engine::Engine(size_t slots, NoiseModel nm, uint32_t max_depth)
    : slots_(slots), nm_(nm), max_depth_(max_depth) {
  if (slots == 0 || (slots & (slots - 1)) != 0)
    throw std::invalid_argument("slot count must be a power of two");
  if (nm_.eta0 < 0 || nm_.sigma < 0)
    throw std::invalid_argument("noise parameters must be nonnegative");
}

Rng Engine::call_stream() { return Rng(mix_seed(nm_.seed, ++call_counter_)); }

void Engine::check_len(const SlotVector& v) const {
  if (v.size() != slots_) throw std::invalid_argument("slot length mismatch");
}

void Engine::check_depth(const OpCounts& oc) const {
  if (max_depth_ != 0 && oc.mults > max_depth_)
    throw std::runtime_error("multiplicative depth budget exceeded");
}

uint64_t Engine::issue_tag(Rng& stream) { return stream.next(); }

KeyPair Engine::keygen(KeyId id) {
  Rng s = call_stream();
  KeyPair kp;
  kp.id = id;
  for (size_t i = 0; i < kp.secret.size(); i += 8) {
    uint64_t w = s.next();
    for (size_t j = 0; j < 8; ++j) kp.secret[i + j] = static_cast<uint8_t>(w >> (8 * j));
  }
  return kp;
}

MockCiphertext Engine::encrypt(const SlotVector& pt, KeyId key) {
  check_len(pt);
  Rng s = call_stream();
  MockCiphertext ct;
  ct.payload.resize(slots_);
  for (size_t i = 0; i < slots_; ++i) ct.payload[i] = pt[i] + s.uniform_sym(nm_.eta0);
  ct.keyset.insert(key);
  ct.noise_bound = nm_.eta0;
  ct.tag = issue_tag(s);
  ++stats_.encrypts;
  return ct;
}

MockCiphertext Engine::add(const MockCiphertext& a, const MockCiphertext& b) {
  check_len(a.payload);
  check_len(b.payload);
  Rng s = call_stream();
  MockCiphertext ct;
  ct.payload.resize(slots_);
  for (size_t i = 0; i < slots_; ++i) ct.payload[i] = a.payload[i] + b.payload[i];
  ct.keyset = a.keyset.united(b.keyset);
  ct.noise_bound = a.noise_bound + b.noise_bound;
  ct.op_counts = OpCounts::merged(a.op_counts, b.op_counts);
  ct.op_counts.adds += 1;
  ct.tag = issue_tag(s);
  ++stats_.adds;
  return ct;
}

MockCiphertext Engine::add(const MockCiphertext& a, const SlotVector& b) {
  check_len(a.payload);
  check_len(b);
  Rng s = call_stream();
  MockCiphertext ct;
  ct.payload.resize(slots_);
  for (size_t i = 0; i < slots_; ++i) ct.payload[i] = a.payload[i] + b[i];
  ct.keyset = a.keyset;
  ct.noise_bound = a.noise_bound;
  ct.op_counts = a.op_counts;
  ct.op_counts.adds += 1;
  ct.tag = issue_tag(s);
  ++stats_.adds;
  return ct;
}

MockCiphertext Engine::add(const SlotVector& a, const MockCiphertext& b) {
  return add(b, a);
}

MockCiphertext Engine::mult(const MockCiphertext& a, const MockCiphertext& b) {
  check_len(a.payload);
  check_len(b.payload);
  Rng s = call_stream();
  MockCiphertext ct;
  ct.payload.resize(slots_);
  for (size_t i = 0; i < slots_; ++i)
    ct.payload[i] = a.payload[i] * b.payload[i] + s.uniform_sym(nm_.sigma);
  ct.keyset = a.keyset.united(b.keyset);
  double ba = max_abs(a.payload), bb = max_abs(b.payload);
  ct.noise_bound = a.noise_bound * bb + b.noise_bound * ba +
                   a.noise_bound * b.noise_bound + nm_.sigma;
  ct.op_counts = OpCounts::merged(a.op_counts, b.op_counts);
  ct.op_counts.mults += 1;
  ct.tag = issue_tag(s);
  ++stats_.mults;
  ++stats_.relins;
  check_depth(ct.op_counts);
  return ct;
}

MockCiphertext Engine::mult(const MockCiphertext& a, const SlotVector& b) {
  check_len(a.payload);
  check_len(b);
  Rng s = call_stream();
  MockCiphertext ct;
  ct.payload.resize(slots_);
  for (size_t i = 0; i < slots_; ++i)
    ct.payload[i] = a.payload[i] * b[i] + s.uniform_sym(nm_.sigma);
  ct.keyset = a.keyset;
  ct.noise_bound = a.noise_bound * max_abs(b) + nm_.sigma;
  ct.op_counts = a.op_counts;
  ct.op_counts.mults += 1;
  ct.tag = issue_tag(s);
  ++stats_.mults;
  ++stats_.relins;
  check_depth(ct.op_counts);
  return ct;
}

MockCiphertext Engine::mult(const SlotVector& a, const MockCiphertext& b) {
  return mult(b, a);
}

MockCiphertext Engine::rotate(const MockCiphertext& src, int64_t r) {
  check_len(src.payload);
  Rng s = call_stream();
  int64_t n = static_cast<int64_t>(slots_);
  int64_t shift = ((r % n) + n) % n;
  MockCiphertext ct;
  ct.payload.resize(slots_);
  for (size_t j = 0; j < slots_; ++j)
    ct.payload[j] = src.payload[(j + static_cast<size_t>(shift)) % slots_];
  ct.keyset = src.keyset;
  ct.noise_bound = src.noise_bound + nm_.sigma;
  ct.op_counts = src.op_counts;
  ct.op_counts.rotations += 1;
  ct.tag = issue_tag(s);
  ++stats_.rotations;
  return ct;
}

PartialShare Engine::partial_dec(const MockCiphertext& ct, const KeyPair& sk) {
  if (!ct.keyset.contains(sk.id))
    throw std::invalid_argument("partial_dec: key not in ciphertext keyset");
  PartialShare share;
  share.ciphertext_digest = ct.digest();
  share.removed_key = sk.id;
  std::vector<uint8_t> buf;
  buf.insert(buf.end(), sk.secret.begin(), sk.secret.end());
  buf.insert(buf.end(), share.ciphertext_digest.begin(), share.ciphertext_digest.end());
  buf.push_back('s');
  share.payload = sha256(buf);
  ++stats_.partial_decs;
  return share;
}

SlotVector Engine::combine(const std::vector<PartialShare>& shares,
                           const MockCiphertext& ct, const KeyPair* own_sk) {
  Digest32 want = ct.digest();
  KeySet covered;
  for (const PartialShare& sh : shares) {
    if (sh.ciphertext_digest != want)
      throw std::invalid_argument("combine: share digest mismatch");
    if (covered.contains(sh.removed_key))
      throw std::invalid_argument("combine: duplicate key share");
    covered.insert(sh.removed_key);
  }
  if (own_sk != nullptr) {
    if (covered.contains(own_sk->id))
      throw std::invalid_argument("combine: duplicate key share");
    covered.insert(own_sk->id);
  }
  if (covered != ct.keyset)
    throw std::invalid_argument("combine: shares do not cover keyset exactly");
  ++stats_.combines;
  return ct.payload;
}

}  // namespace sonni
