#pragma once

#include <cstdint>
#include <vector>

#include "sonni/messages.hpp"
#include "sonni/scenario.hpp"

namespace sonni {

// Per-trial attack bookkeeping. parameters_leaked counts coefficients the
// client ended up holding in plaintext, verified against ground truth by
// the harness before it is trusted.
struct AttackOutcome {
  bool detected = false;
  bool aborted = false;
  size_t parameters_leaked = 0;
  size_t rounds_used = 1;
};

// The baseline substitution: hand the client a parameter ciphertext in
// place of the result. Extending the keyset to match an honest result only
// takes adding an encrypted zero derived from the input.
MockCiphertext baseline_silver_platter(Engine& eng, const EvalRequest& req,
                                       size_t round);

// k distinct uniform slots of [0, width), sorted.
std::vector<uint32_t> choose_theft_slots(size_t width, size_t k, uint64_t seed);

// Computes the honest result, then overwrites the named slots with the
// aligned degree-0 parameter values.
MockCiphertext overwrite_slots(Engine& eng, const EvalRequest& req,
                               const std::vector<uint32_t>& slots);

// The Theorem-1 attacker: chooses k slots blind and overwrites them. The
// stolen slot set is reported so tests can verify leaks against ground
// truth.
MockCiphertext one_shot_theft(Engine& eng, const EvalRequest& req,
                              const PublicParams& pub, size_t k, uint64_t seed,
                              std::vector<uint32_t>& stolen_out);

// A colluding provider names x-carrying slots instead of the canary slots,
// so the client's response hashes masked f'(x) values. m must not exceed d.
std::vector<uint32_t> malicious_provider_indices(const ShufflePlan& plan,
                                                 size_t m);

// A dishonest client fabricates its check response.
Digest32 lying_client_digest(uint64_t seed);

}  // namespace sonni
