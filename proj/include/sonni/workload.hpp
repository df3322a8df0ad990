#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sonni/engine.hpp"
#include "sonni/slot_vector.hpp"

namespace sonni {

// Slotwise polynomial: slot s of the output depends only on slot s of the
// input. coeffs[k][s] is the degree-k coefficient governing slot s, so
// coeffs has degree+1 vectors of identical length.
struct SlotwiseModel {
  std::vector<SlotVector> coeffs;
  KeyId owner = kProviderKey;

  size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  size_t width() const { return coeffs.empty() ? 0 : coeffs[0].size(); }
  void validate() const;
};

// Uniform random model with coefficients in [lo, hi].
SlotwiseModel random_model(size_t width, size_t degree, double lo, double hi,
                           uint64_t seed);

// Per-slot Horner evaluation in exact plaintext arithmetic.
SlotVector eval_plain(const SlotwiseModel& model, const SlotVector& input);

// One slot's polynomial at value v.
double eval_slot(const SlotwiseModel& model, size_t slot, double v);

// Horner over ciphertexts: degree ciphertext-ciphertext mults and degree
// adds. param_cts[k] encrypts the degree-k coefficient vector.
MockCiphertext eval_encrypted(Engine& eng,
                              const std::vector<MockCiphertext>& param_cts,
                              const MockCiphertext& input_ct);

// Canary inputs are drawn from the same range as client inputs so their
// marginal distribution gives the server nothing to distinguish.
SlotVector gen_canaries(size_t m, double lo, double hi, uint64_t seed);

// Model file round-trip (JSON; schema documented in the README).
std::string model_to_json(const SlotwiseModel& model);
SlotwiseModel model_from_json(const std::string& text);
void save_model(const SlotwiseModel& model, const std::string& path);
SlotwiseModel load_model(const std::string& path);

}  // namespace sonni
