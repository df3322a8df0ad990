#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sonni/scenario.hpp"

namespace sonni {

enum class Formula { PerRound, OneShot };

const char* formula_name(Formula f);
Formula formula_from_name(const std::string& name);

// Attack-success probability, carried in log10 because the interesting
// regime reaches 1e-307. p is the direct form, 0 on underflow. eps1/eps2
// are the assumed-negligible encryption/hash break probabilities; they only
// enter additively via p_bound().
struct ProbabilityResult {
  Formula formula = Formula::PerRound;
  size_t d = 0, m = 0, k = 0;
  double log10_p = 0.0;
  double p = 1.0;
  double eps1 = 0.0, eps2 = 0.0;

  double p_bound() const;
};

// (d/(d+m))^k: one independent guess per round, fresh canary placement.
ProbabilityResult p_per_round(size_t d, size_t m, size_t k, double eps1 = 0.0,
                              double eps2 = 0.0);

// prod_{i<k} (d-i)/(d+m-i): k distinct slots guessed within one ciphertext;
// exactly 0 for k > d.
ProbabilityResult p_one_shot(size_t d, size_t m, size_t k, double eps1 = 0.0,
                             double eps2 = 0.0);

struct MonteCarloEstimate {
  uint64_t trials = 0;
  uint64_t successes = 0;
  double p_hat = 0.0;
  double stderr_ = 0.0;
  uint64_t seed = 0;
};

// Fast-path estimator: samples slot guesses directly and tests canary
// intersection. Work is split over 512 fixed shards with seeds derived from
// (seed, shard), so the parallel and serial versions produce bit-identical
// counts for any thread count.
MonteCarloEstimate monte_carlo(Formula formula, size_t d, size_t m, size_t k,
                               uint64_t trials, uint64_t seed);
MonteCarloEstimate monte_carlo_serial(Formula formula, size_t d, size_t m,
                                      size_t k, uint64_t trials, uint64_t seed);

// One shard of the fast path; shared by both drivers and the benchmark.
uint64_t monte_carlo_shard(Formula formula, size_t d, size_t m, size_t k,
                           uint64_t shard_seed, uint64_t shard_trials);

// Slow-path estimator: full protocol runs with a one-shot theft server.
// Success means the run delivered (the theft evaded the check).
MonteCarloEstimate monte_carlo_protocol(const Scenario& base, size_t k,
                                        uint64_t trials, uint64_t seed);

struct Table1Entry {
  size_t m = 0, k = 0;
  double paper_p = 0.0;
  ProbabilityResult one_shot;
  ProbabilityResult per_round;
};

// The published 1024-slot table: m in {4,32,512}, k in {10,128,256,512},
// d = 1024-m, alongside both closed forms.
std::vector<Table1Entry> reproduce_table1();

// Fraction of slots spent on checking: m/N.
double batching_overhead(size_t slots, size_t m);

struct CurvePoint {
  Formula formula = Formula::PerRound;
  size_t d = 0, m = 0, k = 0;
  double log10_p = 0.0;
  double p = 0.0;
};

// Success-probability curves over m for each k, both formulas, at fixed
// total width `slots` (d = slots-m).
std::vector<CurvePoint> figure3_curves(size_t slots,
                                       const std::vector<size_t>& k_list,
                                       size_t m_lo, size_t m_hi);

}  // namespace sonni
