#include "sonni/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace sonni {

std::string strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::HonestServer: return "honest";
    case StrategyKind::BaselineSilverPlatter: return "silver-platter";
    case StrategyKind::OneShotTheft: return "one-shot-theft";
    case StrategyKind::PerRoundTheft: return "per-round-theft";
    case StrategyKind::MaliciousProviderIndices: return "malicious-provider";
    case StrategyKind::LyingClient: return "lying-client";
  }
  throw std::logic_error("unknown strategy kind");
}

StrategyKind strategy_from_name(const std::string& name) {
  if (name == "honest") return StrategyKind::HonestServer;
  if (name == "silver-platter") return StrategyKind::BaselineSilverPlatter;
  if (name == "one-shot-theft") return StrategyKind::OneShotTheft;
  if (name == "per-round-theft") return StrategyKind::PerRoundTheft;
  if (name == "malicious-provider") return StrategyKind::MaliciousProviderIndices;
  if (name == "lying-client") return StrategyKind::LyingClient;
  throw std::invalid_argument("unknown strategy: " + name);
}

std::string mode_name(Mode mode) {
  return mode == Mode::Legacy ? "legacy" : "sonni";
}

Mode mode_from_name(const std::string& name) {
  if (name == "legacy") return Mode::Legacy;
  if (name == "sonni") return Mode::Sonni;
  throw std::invalid_argument("unknown mode: " + name);
}

DerivedSeeds Scenario::seeds() const {
  DerivedSeeds s;
  s.client_engine = mix_seed(master_seed, 1);
  s.provider_engine = mix_seed(master_seed, 2);
  s.server_engine = mix_seed(master_seed, 3);
  s.x = mix_seed(master_seed, 4);
  s.model_f = mix_seed(master_seed, 5);
  s.model_g = mix_seed(master_seed, 6);
  s.y = mix_seed(master_seed, 7);
  s.plan = mix_seed(master_seed, 8);
  s.rand_mask = mix_seed(master_seed, 9);
  s.strategy = strategy.seed != 0 ? strategy.seed : mix_seed(master_seed, 10);
  return s;
}

double Scenario::analytic_noise_bound() const {
  double amp = std::max(std::fabs(pub.input_lo), std::fabs(pub.input_hi));
  // Input noise. Every shuffle step adds 2*sigma to every slot (each of the
  // two mult branches injects), and a value that keeps being re-chosen can
  // additionally absorb the standing noise of up to m destination slots, so
  // the cascade term is quadratic in m. The canary-carrier encryption adds
  // one more eta0 on top.
  double nu_in = pub.eta0;
  if (pub.mode == Mode::Sonni) {
    double m = static_cast<double>(pub.m);
    nu_in = (m + 1.0) * pub.eta0 + 2.0 * m * (m + 2.0) * pub.sigma + pub.eta0;
  }
  double x_hat = amp + nu_in;
  // Horner: nu' = nu*X + nu_in*B + nu*nu_in + sigma (mult), + eta0 (the
  // next coefficient ciphertext's noise joins in the add).
  double nu = pub.eta0;
  double b_hat = amp;
  for (size_t k = 0; k < pub.degree; ++k) {
    nu = nu * x_hat + nu_in * b_hat + nu * nu_in + pub.sigma + pub.eta0;
    b_hat = b_hat * x_hat + amp;
  }
  if (pub.mode == Mode::Sonni) nu += pub.sigma;
  return nu;
}

void Scenario::validate() const {
  const PublicParams& p = pub;
  if (p.slots == 0 || (p.slots & (p.slots - 1)) != 0)
    throw std::invalid_argument("slots must be a power of two");
  if (p.d + p.m > p.slots)
    throw std::invalid_argument("d+m exceeds slot count");
  if (p.mode == Mode::Sonni && p.m < 1)
    throw std::invalid_argument("sonni mode requires at least one canary slot");
  if (p.mode == Mode::Legacy && p.m != 0)
    throw std::invalid_argument("legacy mode carries no canary slots");
  if (p.degree < 1)
    throw std::invalid_argument("model degree must be at least 1");
  if (!(p.input_lo < p.input_hi))
    throw std::invalid_argument("empty input range");
  if (!(p.quant_step > 0))
    throw std::invalid_argument("quantization step must be positive");
  if (!(p.r_min > 0) || p.r_min >= 1.0)
    throw std::invalid_argument("r_min must lie in (0,1)");
  if (p.eta0 < 0 || p.sigma < 0)
    throw std::invalid_argument("noise parameters must be nonnegative");
  if (!(p.quant_step > 2.0 * analytic_noise_bound()))
    throw std::invalid_argument(
        "quantization step must exceed twice the end-to-end noise bound");
  if (strategy.kind == StrategyKind::OneShotTheft &&
      (strategy.k < 1 || strategy.k > p.d + p.m))
    throw std::invalid_argument("one-shot theft k must lie in [1, d+m]");
}

}  // namespace sonni
