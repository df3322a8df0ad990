#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sonni/digest.hpp"
#include "sonni/keys.hpp"
#include "sonni/slot_vector.hpp"
#include "sonni/util.hpp"

namespace sonni {

// Noise configuration for the mock scheme. eta0 is injected per slot at
// encryption, sigma per multiplication. Rotation shifts slots exactly but
// still widens the tracked bound by sigma.
struct NoiseModel {
  double eta0 = 0.0;
  double sigma = 0.0;
  uint64_t seed = 0;
};

// Per-ciphertext operation counters, a stand-in for multiplicative depth.
// Combining two ciphertexts takes the elementwise max of their counters
// before the new operation is added.
struct OpCounts {
  uint32_t adds = 0;
  uint32_t mults = 0;
  uint32_t rotations = 0;

  static OpCounts merged(const OpCounts& a, const OpCounts& b) {
    return OpCounts{std::max(a.adds, b.adds), std::max(a.mults, b.mults),
                    std::max(a.rotations, b.rotations)};
  }
  bool operator==(const OpCounts&) const = default;
};

// The unit all parties exchange. payload holds the true underlying values
// perturbed by injected noise; noise_bound is a conservative analytic bound
// on |payload - ideal|_inf. tag is fresh randomness so that two ciphertexts
// with equal payloads still have distinct digests.
struct MockCiphertext {
  SlotVector payload;
  KeySet keyset;
  double noise_bound = 0.0;
  OpCounts op_counts;
  uint64_t tag = 0;

  Digest32 digest() const;
};

// One party's contribution to decrypting a multikey ciphertext. payload is
// opaque share material; combine only inspects the digest and removed_key.
struct PartialShare {
  Digest32 ciphertext_digest{};
  KeyId removed_key = 0;
  std::array<uint8_t, 32> payload{};
};

// Cumulative operation counts across all calls on one engine instance.
// relins mirrors mults: relinearization is a no-op here but counted.
struct CallStats {
  uint64_t encrypts = 0;
  uint64_t adds = 0;
  uint64_t mults = 0;
  uint64_t relins = 0;
  uint64_t rotations = 0;
  uint64_t partial_decs = 0;
  uint64_t combines = 0;
};

// Semantic mock of a multikey homomorphic vector scheme. One instance per
// party. Randomness for each call is drawn from a stream derived from
// (seed, call counter), so identical seeds give bit-identical payloads,
// tags, and digests regardless of what other engines do.
class Engine {
 public:
  // max_depth, when nonzero, bounds the mults counter of any ciphertext
  // this engine produces.
  Engine(size_t slots, NoiseModel nm, uint32_t max_depth = 0);

  KeyPair keygen(KeyId id);

  MockCiphertext encrypt(const SlotVector& pt, KeyId key);
  MockCiphertext add(const MockCiphertext& a, const MockCiphertext& b);
  MockCiphertext add(const MockCiphertext& a, const SlotVector& b);
  MockCiphertext add(const SlotVector& a, const MockCiphertext& b);
  MockCiphertext mult(const MockCiphertext& a, const MockCiphertext& b);
  MockCiphertext mult(const MockCiphertext& a, const SlotVector& b);
  MockCiphertext mult(const SlotVector& a, const MockCiphertext& b);
  // Slot j of the output equals slot (j+r mod N) of the input.
  MockCiphertext rotate(const MockCiphertext& ct, int64_t r);

  PartialShare partial_dec(const MockCiphertext& ct, const KeyPair& sk);
  // shares plus (optionally) a share derived from own_sk must cover
  // ct.keyset exactly, with matching digests.
  SlotVector combine(const std::vector<PartialShare>& shares,
                     const MockCiphertext& ct, const KeyPair* own_sk);

  size_t slots() const { return slots_; }
  const NoiseModel& noise_model() const { return nm_; }
  const CallStats& stats() const { return stats_; }
  void reset_stats() { stats_ = CallStats{}; }

 private:
  Rng call_stream();
  void check_len(const SlotVector& v) const;
  void check_depth(const OpCounts& oc) const;
  uint64_t issue_tag(Rng& stream);

  size_t slots_;
  NoiseModel nm_;
  uint32_t max_depth_;
  uint64_t call_counter_ = 0;
  CallStats stats_;
};

}  // namespace sonni
