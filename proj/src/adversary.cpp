#include "sonni/adversary.hpp"

#include <algorithm>
#include <stdexcept>

#include "sonni/workload.hpp"

namespace sonni {

MockCiphertext baseline_silver_platter(Engine& eng, const EvalRequest& req,
                                       size_t round) {
  if (req.param_cts.empty()) throw std::invalid_argument("no parameters to steal");
  const MockCiphertext& target = req.param_cts[round % req.param_cts.size()];
  // mult by the zero vector keeps the client key in the keyset while
  // contributing (noise-level) nothing to the payload.
  MockCiphertext zero = eng.mult(req.input_ct, SlotVector(eng.slots(), 0.0));
  return eng.add(target, zero);
}

std::vector<uint32_t> choose_theft_slots(size_t width, size_t k, uint64_t seed) {
  if (k < 1 || k > width) throw std::invalid_argument("theft size out of range");
  Rng rng(seed);
  std::vector<uint32_t> slots;
  slots.reserve(k);
  while (slots.size() < k) {
    uint32_t slot = static_cast<uint32_t>(rng.below(width));
    if (std::find(slots.begin(), slots.end(), slot) == slots.end())
      slots.push_back(slot);
  }
  std::sort(slots.begin(), slots.end());
  return slots;
}

MockCiphertext overwrite_slots(Engine& eng, const EvalRequest& req,
                               const std::vector<uint32_t>& slots) {
  if (req.param_cts.empty()) throw std::invalid_argument("no parameters to steal");
  MockCiphertext honest = eval_encrypted(eng, req.param_cts, req.input_ct);
  SlotVector keep(eng.slots(), 1.0);
  SlotVector take(eng.slots(), 0.0);
  for (uint32_t slot : slots) {
    keep.at(slot) = 0.0;
    take.at(slot) = 1.0;
  }
  return eng.add(eng.mult(honest, keep), eng.mult(req.param_cts.front(), take));
}

MockCiphertext one_shot_theft(Engine& eng, const EvalRequest& req,
                              const PublicParams& pub, size_t k, uint64_t seed,
                              std::vector<uint32_t>& stolen_out) {
  stolen_out = choose_theft_slots(pub.d + pub.m, k, seed);
  return overwrite_slots(eng, req, stolen_out);
}

std::vector<uint32_t> malicious_provider_indices(const ShufflePlan& plan,
                                                 size_t m) {
  if (m > plan.d)
    throw std::invalid_argument("not enough x slots to misname as canaries");
  std::vector<uint32_t> positions(plan.pi.forward.begin(),
                                  plan.pi.forward.begin() + m);
  std::sort(positions.begin(), positions.end());
  return positions;
}

Digest32 lying_client_digest(uint64_t seed) {
  Rng rng(seed);
  Digest32 d{};
  for (size_t i = 0; i < d.size(); i += 8) {
    uint64_t w = rng.next();
    for (size_t j = 0; j < 8; ++j) d[i + j] = static_cast<uint8_t>(w >> (8 * j));
  }
  return d;
}

}  // namespace sonni
