#pragma once

#include <cstdint>
#include <string>

#include "sonni/util.hpp"

namespace sonni {

// Legacy is the unshuffled, uncheck protocol the attack analysis targets;
// Sonni adds canary slots, masking, and the hash check.
enum class Mode { Legacy, Sonni };

enum class StrategyKind {
  HonestServer,
  BaselineSilverPlatter,
  OneShotTheft,
  PerRoundTheft,
  MaliciousProviderIndices,
  LyingClient,
};

// Which party misbehaves and how. k is the slot count for OneShotTheft and
// the round count for PerRoundTheft. seed drives the strategy's own draws
// (stolen-slot choice, fabricated digests); round picks the parameter row a
// repeated silver-platter attack substitutes.
struct StrategySpec {
  StrategyKind kind = StrategyKind::HonestServer;
  size_t k = 1;
  uint64_t seed = 0;
  size_t round = 0;
};

std::string strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(const std::string& name);
std::string mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

// Everything every party may know: sizes, noise model, quantization, mode.
// Seeds and secrets are deliberately not in here.
struct PublicParams {
  size_t slots = 1024;
  size_t d = 8;
  size_t m = 2;
  size_t degree = 2;
  double input_lo = -1.0;
  double input_hi = 1.0;
  double quant_step = 1e-3;
  double eta0 = 1e-9;
  double sigma = 1e-9;
  double r_min = 0.1;
  Mode mode = Mode::Sonni;
  bool boundary_avoidance = true;
};

// Independent streams derived from the master seed. Fixing the master seed
// fixes every party's randomness, which is what makes paired runs (same
// seeds, different x) and cross-transport replays byte-comparable.
struct DerivedSeeds {
  uint64_t client_engine = 0;
  uint64_t provider_engine = 0;
  uint64_t server_engine = 0;
  uint64_t x = 0;
  uint64_t model_f = 0;
  uint64_t model_g = 0;
  uint64_t y = 0;
  uint64_t plan = 0;
  uint64_t rand_mask = 0;
  uint64_t strategy = 0;
};

struct Scenario {
  PublicParams pub;
  uint64_t master_seed = 1;
  StrategySpec strategy;

  DerivedSeeds seeds() const;

  // Worst-case end-to-end noise accumulated by the full pipeline (encrypt,
  // shuffle, canary insertion, Horner evaluation, mask multiplication),
  // bounded per slot. The per-ciphertext noise_bound the engine tracks is
  // far more conservative (it doubles at every shuffle add), so the
  // quantization gate is checked against this pipeline-aware bound.
  double analytic_noise_bound() const;

  // Throws std::invalid_argument naming the violated invariant.
  void validate() const;
};

}  // namespace sonni
