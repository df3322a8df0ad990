#pragma once

#include <cstdint>
#include <vector>

#include "sonni/engine.hpp"
#include "sonni/slot_vector.hpp"

namespace sonni {

// Bijection on [0, n). forward maps original slot position to final
// position; inverse undoes it.
struct Permutation {
  std::vector<uint32_t> forward;
  std::vector<uint32_t> inverse;

  static Permutation from_forward(std::vector<uint32_t> fwd);
  size_t size() const { return forward.size(); }
  bool operator==(const Permutation&) const = default;
};

// The provider's shuffle decision: m distinct canary destinations in
// [0, d+m), sorted ascending, plus the slot permutation the masked-rotate
// move sequence realizes. Original x slots are [0, d); original canary
// slots are [d, d+m) and end up exactly on chosen.
struct ShufflePlan {
  size_t d = 0;
  size_t m = 0;
  std::vector<uint32_t> chosen;
  Permutation pi;
  uint64_t seed = 0;
};

// Rejection-samples m distinct indices, sorts them, and derives the
// permutation by simulating the move sequence.
ShufflePlan plan_shuffle(size_t d, size_t m, uint64_t seed);

// Plan with an explicit chosen set (test hook for exhaustive sweeps and
// identity-plan injection). chosen must be sorted, distinct, in [0, d+m).
ShufflePlan plan_from_chosen(size_t d, size_t m, std::vector<uint32_t> chosen);

// The masked-rotate shuffle: per chosen index (rank i), isolate the slot,
// rotate it to position d+i, zero it in place, add back. Precondition:
// ct holds x in [0, d) and zeros in [d, d+m); slots past d+m pass through.
MockCiphertext shuffle_ciphertext(Engine& eng, const MockCiphertext& ct,
                                  const ShufflePlan& plan);

// Adds a provider-encrypted vector carrying y on plan.chosen and zeros
// elsewhere. Resulting keyset is the union with {provider_key}.
MockCiphertext insert_canaries(Engine& eng, const MockCiphertext& ct,
                               const SlotVector& y, const ShufflePlan& plan,
                               KeyId provider_key);

// Algebraic oracle: applies plan.pi to the first d+m slots of a width-n
// vector, leaving the padding slots in place.
SlotVector apply_plan(const ShufflePlan& plan, const SlotVector& in);

// Reorders per-degree coefficient vectors so that position p carries the
// coefficient governing the value the permutation placed at slot p.
// f_coeffs vectors have length d, g_coeffs length m; output length d+m.
std::vector<SlotVector> permute_parameters(
    const std::vector<SlotVector>& f_coeffs,
    const std::vector<SlotVector>& g_coeffs, const ShufflePlan& plan);

}  // namespace sonni
