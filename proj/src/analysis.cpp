#include "sonni/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sonni/protocol.hpp"
#include "sonni/util.hpp"

namespace sonni {

namespace {

constexpr uint64_t kShards = 512;

uint64_t shard_trials(uint64_t trials, uint64_t shard) {
  return trials / kShards + (shard < trials % kShards ? 1 : 0);
}

double finish(ProbabilityResult& r) {
  r.p = std::isinf(r.log10_p) ? 0.0 : std::pow(10.0, r.log10_p);
  return r.p;
}

// One guess sequence without replacement. Conditional on the first i guesses
// all landing on data slots, d-i of the remaining d+m-i slots are data, so
// only the running failure test is needed, no slot set.
bool one_shot_trial(Rng& rng, size_t d, size_t m, size_t k) {
  size_t width = d + m;
  for (size_t i = 0; i < k; ++i) {
    uint64_t data_left = d > i ? d - i : 0;
    if (rng.below(width - i) >= data_left) return false;
  }
  return true;
}

bool per_round_trial(Rng& rng, size_t d, size_t m, size_t k) {
  for (size_t i = 0; i < k; ++i) {
    if (rng.below(d + m) >= d) return false;
  }
  return true;
}

MonteCarloEstimate finish_estimate(uint64_t trials, uint64_t successes,
                                   uint64_t seed) {
  MonteCarloEstimate e;
  e.trials = trials;
  e.successes = successes;
  e.seed = seed;
  e.p_hat = trials ? double(successes) / double(trials) : 0.0;
  e.stderr_ =
      trials ? std::sqrt(e.p_hat * (1.0 - e.p_hat) / double(trials)) : 0.0;
  return e;
}

}  // namespace

double ProbabilityResult::p_bound() const {
  return std::min(1.0, p + eps1 + eps2);
}

const char* formula_name(Formula f) {
  return f == Formula::OneShot ? "one-shot" : "per-round";
}

Formula formula_from_name(const std::string& name) {
  if (name == "one-shot") return Formula::OneShot;
  if (name == "per-round") return Formula::PerRound;
  throw std::invalid_argument("unknown formula: " + name);
}

ProbabilityResult p_per_round(size_t d, size_t m, size_t k, double eps1,
                              double eps2) {
  if (d == 0) throw std::invalid_argument("per-round bound needs d >= 1");
  ProbabilityResult r;
  r.formula = Formula::PerRound;
  r.d = d;
  r.m = m;
  r.k = k;
  r.eps1 = eps1;
  r.eps2 = eps2;
  r.log10_p =
      double(k) * (std::log10(double(d)) - std::log10(double(d + m)));
  finish(r);
  return r;
}

ProbabilityResult p_one_shot(size_t d, size_t m, size_t k, double eps1,
                             double eps2) {
  if (k > d + m)
    throw std::invalid_argument("one-shot bound needs k <= d+m");
  ProbabilityResult r;
  r.formula = Formula::OneShot;
  r.d = d;
  r.m = m;
  r.k = k;
  r.eps1 = eps1;
  r.eps2 = eps2;
  if (k > d) {
    r.log10_p = -std::numeric_limits<double>::infinity();
  } else {
    double acc = 0.0;
    for (size_t i = 0; i < k; ++i)
      acc += std::log10(double(d - i)) - std::log10(double(d + m - i));
    r.log10_p = acc;
  }
  finish(r);
  return r;
}

uint64_t monte_carlo_shard(Formula formula, size_t d, size_t m, size_t k,
                           uint64_t shard_seed, uint64_t shard_trials) {
  Rng rng(shard_seed);
  uint64_t hits = 0;
  if (formula == Formula::OneShot) {
    for (uint64_t t = 0; t < shard_trials; ++t)
      hits += one_shot_trial(rng, d, m, k);
  } else {
    for (uint64_t t = 0; t < shard_trials; ++t)
      hits += per_round_trial(rng, d, m, k);
  }
  return hits;
}

MonteCarloEstimate monte_carlo(Formula formula, size_t d, size_t m, size_t k,
                               uint64_t trials, uint64_t seed) {
  if (d + m == 0) throw std::invalid_argument("monte carlo needs d+m >= 1");
  if (formula == Formula::OneShot && k > d + m)
    throw std::invalid_argument("monte carlo one-shot needs k <= d+m");
  std::vector<uint64_t> counts(kShards, 0);
#pragma omp parallel for schedule(dynamic)
  for (int64_t s = 0; s < int64_t(kShards); ++s) {
    counts[size_t(s)] = monte_carlo_shard(
        formula, d, m, k, mix_seed(seed, uint64_t(s)),
        shard_trials(trials, uint64_t(s)));
  }
  uint64_t total = 0;
  for (uint64_t c : counts) total += c;
  return finish_estimate(trials, total, seed);
}

MonteCarloEstimate monte_carlo_serial(Formula formula, size_t d, size_t m,
                                      size_t k, uint64_t trials,
                                      uint64_t seed) {
  if (d + m == 0) throw std::invalid_argument("monte carlo needs d+m >= 1");
  if (formula == Formula::OneShot && k > d + m)
    throw std::invalid_argument("monte carlo one-shot needs k <= d+m");
  uint64_t total = 0;
  for (uint64_t s = 0; s < kShards; ++s)
    total += monte_carlo_shard(formula, d, m, k, mix_seed(seed, s),
                               shard_trials(trials, s));
  return finish_estimate(trials, total, seed);
}

MonteCarloEstimate monte_carlo_protocol(const Scenario& base, size_t k,
                                        uint64_t trials, uint64_t seed) {
  Scenario sc = base;
  sc.strategy.kind = StrategyKind::OneShotTheft;
  sc.strategy.k = k;
  sc.validate();
  uint64_t hits = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    sc.master_seed = mix_seed(seed, t);
    RunResult run = run_in_process(sc);
    hits += run.status == RunStatus::Delivered;
  }
  return finish_estimate(trials, hits, seed);
}

std::vector<Table1Entry> reproduce_table1() {
  struct Row {
    size_t m;
    double p[4];
  };
  static const size_t ks[4] = {10, 128, 256, 512};
  static const Row rows[3] = {
      {4, {0.952, 0.513, 0.237, 0.0311}},
      {32, {0.720, 0.011, 6.34e-5, 7.07e-11}},
      {512, {9.25e-4, 2.88e-43, 1.02e-96, 1.23e-307}},
  };
  std::vector<Table1Entry> out;
  for (const Row& row : rows) {
    size_t d = 1024 - row.m;
    for (size_t j = 0; j < 4; ++j) {
      Table1Entry e;
      e.m = row.m;
      e.k = ks[j];
      e.paper_p = row.p[j];
      e.one_shot = p_one_shot(d, row.m, ks[j]);
      e.per_round = p_per_round(d, row.m, ks[j]);
      out.push_back(e);
    }
  }
  return out;
}

double batching_overhead(size_t slots, size_t m) {
  if (slots == 0) throw std::invalid_argument("overhead needs slots >= 1");
  if (m > slots) throw std::invalid_argument("overhead needs m <= slots");
  return double(m) / double(slots);
}

std::vector<CurvePoint> figure3_curves(size_t slots,
                                       const std::vector<size_t>& k_list,
                                       size_t m_lo, size_t m_hi) {
  if (m_lo == 0 || m_hi >= slots || m_lo > m_hi)
    throw std::invalid_argument("curve range needs 1 <= m_lo <= m_hi < slots");
  std::vector<CurvePoint> out;
  for (size_t k : k_list) {
    for (size_t m = m_lo; m <= m_hi; ++m) {
      size_t d = slots - m;
      for (Formula f : {Formula::PerRound, Formula::OneShot}) {
        if (f == Formula::OneShot && k > d + m) continue;
        ProbabilityResult r = f == Formula::OneShot ? p_one_shot(d, m, k)
                                                    : p_per_round(d, m, k);
        out.push_back({f, d, m, k, r.log10_p, r.p});
      }
    }
  }
  return out;
}

}  // namespace sonni
