#include "sonni/shuffle.hpp"

#include <algorithm>
#include <stdexcept>

namespace sonni {

Permutation Permutation::from_forward(std::vector<uint32_t> fwd) {
  Permutation p;
  p.inverse.assign(fwd.size(), UINT32_MAX);
  for (uint32_t s = 0; s < fwd.size(); ++s) {
    uint32_t t = fwd[s];
    if (t >= fwd.size() || p.inverse[t] != UINT32_MAX)
      throw std::invalid_argument("forward map is not a bijection");
    p.inverse[t] = s;
  }
  p.forward = std::move(fwd);
  return p;
}

namespace {

// Derives the permutation by tracking which original slot's value occupies
// each position through the move sequence. Canary destinations take the
// original zero slots [d, d+m) in rank order.
Permutation derive_pi(size_t d, size_t m, const std::vector<uint32_t>& chosen) {
  size_t n = d + m;
  std::vector<int64_t> who(n);
  for (size_t s = 0; s < n; ++s) who[s] = s < d ? static_cast<int64_t>(s) : -1;
  for (size_t i = 0; i < m; ++i) {
    uint32_t c = chosen[i];
    int64_t v = who[c];
    who[c] = -1;
    if (v >= 0) {
      if (who[d + i] >= 0)
        throw std::logic_error("shuffle destination already occupied");
      who[d + i] = v;
    }
  }
  std::vector<uint32_t> fwd(n, UINT32_MAX);
  for (size_t p = 0; p < n; ++p)
    if (who[p] >= 0) fwd[static_cast<size_t>(who[p])] = static_cast<uint32_t>(p);
  for (size_t j = 0; j < m; ++j) fwd[d + j] = chosen[j];
  return Permutation::from_forward(std::move(fwd));
}

}  // namespace

ShufflePlan plan_shuffle(size_t d, size_t m, uint64_t seed) {
  if (m < 1) throw std::invalid_argument("plan_shuffle: m must be at least 1");
  Rng rng(seed);
  std::vector<uint32_t> chosen;
  chosen.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    uint32_t index;
    do {
      index = static_cast<uint32_t>(rng.below(d + m));
    } while (std::find(chosen.begin(), chosen.end(), index) != chosen.end());
    chosen.push_back(index);
  }
  std::sort(chosen.begin(), chosen.end());
  ShufflePlan plan;
  plan.d = d;
  plan.m = m;
  plan.chosen = std::move(chosen);
  plan.pi = derive_pi(d, m, plan.chosen);
  plan.seed = seed;
  return plan;
}

ShufflePlan plan_from_chosen(size_t d, size_t m, std::vector<uint32_t> chosen) {
  if (chosen.size() != m) throw std::invalid_argument("chosen size must be m");
  for (size_t i = 0; i < m; ++i) {
    if (chosen[i] >= d + m) throw std::invalid_argument("chosen index out of range");
    if (i > 0 && chosen[i] <= chosen[i - 1])
      throw std::invalid_argument("chosen indices must be sorted and distinct");
  }
  ShufflePlan plan;
  plan.d = d;
  plan.m = m;
  plan.chosen = std::move(chosen);
  plan.pi = derive_pi(d, m, plan.chosen);
  return plan;
}

MockCiphertext shuffle_ciphertext(Engine& eng, const MockCiphertext& ct,
                                  const ShufflePlan& plan) {
  size_t n = eng.slots();
  if (plan.d + plan.m > n) throw std::invalid_argument("plan wider than slot count");
  MockCiphertext cur = ct;
  for (size_t i = 0; i < plan.m; ++i) {
    uint32_t index = plan.chosen[i];
    MockCiphertext masked = eng.mult(cur, basis_vector(n, index));
    // Engine rotation pulls slot j+r into slot j, so the amount that lands
    // the isolated value at d+i is index-(d+i).
    masked = eng.rotate(masked, static_cast<int64_t>(index) -
                                    static_cast<int64_t>(plan.d + i));
    cur = eng.mult(cur, complement_vector(n, index));
    cur = eng.add(cur, masked);
  }
  return cur;
}

MockCiphertext insert_canaries(Engine& eng, const MockCiphertext& ct,
                               const SlotVector& y, const ShufflePlan& plan,
                               KeyId provider_key) {
  if (y.size() != plan.m) throw std::invalid_argument("canary vector length != m");
  SlotVector carrier(eng.slots(), 0.0);
  for (size_t j = 0; j < plan.m; ++j) carrier[plan.chosen[j]] = y[j];
  return eng.add(ct, eng.encrypt(carrier, provider_key));
}

SlotVector apply_plan(const ShufflePlan& plan, const SlotVector& in) {
  size_t w = plan.d + plan.m;
  if (w > in.size()) throw std::invalid_argument("plan wider than vector");
  SlotVector out = in;
  for (size_t s = 0; s < w; ++s) out[plan.pi.forward[s]] = in[s];
  return out;
}

std::vector<SlotVector> permute_parameters(
    const std::vector<SlotVector>& f_coeffs,
    const std::vector<SlotVector>& g_coeffs, const ShufflePlan& plan) {
  if (f_coeffs.size() != g_coeffs.size())
    throw std::invalid_argument("f and g polynomial degrees differ");
  std::vector<SlotVector> out(f_coeffs.size());
  for (size_t deg = 0; deg < f_coeffs.size(); ++deg) {
    if (f_coeffs[deg].size() != plan.d || g_coeffs[deg].size() != plan.m)
      throw std::invalid_argument("coefficient vector length mismatch");
    SlotVector& slot = out[deg];
    slot.assign(plan.d + plan.m, 0.0);
    for (size_t s = 0; s < plan.d; ++s)
      slot[plan.pi.forward[s]] = f_coeffs[deg][s];
    for (size_t j = 0; j < plan.m; ++j)
      slot[plan.pi.forward[plan.d + j]] = g_coeffs[deg][j];
  }
  return out;
}

}  // namespace sonni
