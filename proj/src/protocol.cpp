#include "sonni/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "sonni/shuffle.hpp"
#include "sonni/transcript.hpp"
#include "sonni/wire.hpp"

namespace sonni {

int64_t quantize(double v, double step) {
  if (!(step > 0)) throw std::invalid_argument("quantization step must be positive");
  return static_cast<int64_t>(std::floor(v / step + 0.5));
}

Digest32 check_hash(const std::vector<int64_t>& cells) {
  std::vector<uint8_t> buf;
  buf.reserve(1 + 8 * cells.size());
  buf.push_back(0x43);
  for (int64_t c : cells) put_i64le(buf, c);
  return sha256(buf);
}

SlotVector gen_mask(size_t n_total, size_t width, double r_min, uint64_t seed) {
  if (width > n_total) throw std::invalid_argument("mask width exceeds slot count");
  Rng rng(seed);
  SlotVector r(n_total, 1.0);
  for (size_t i = 0; i < width; ++i) {
    double v;
    do {
      v = rng.uniform(-1.0, 1.0);
    } while (std::fabs(v) < r_min);
    r[i] = v;
  }
  return r;
}

double cell_edge_distance(double v, double step) {
  double frac = v / step + 0.5;
  return std::fabs(frac - std::round(frac)) * step;
}

namespace {

std::vector<uint8_t> digest_bytes(const Digest32& d) {
  return std::vector<uint8_t>(d.begin(), d.end());
}

SlotVector padded(const SlotVector& v, size_t n) {
  SlotVector out(n, 0.0);
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

}  // namespace

// ---- client ----

ClientParty::ClientParty(const PublicParams& pub, uint64_t engine_seed,
                         SlotVector x, StrategySpec strategy)
    : pub_(pub),
      eng_(pub.slots, NoiseModel{pub.eta0, pub.sigma, engine_seed}),
      strategy_(strategy) {
  if (x.size() != pub.d) throw std::invalid_argument("client input length != d");
  sk_ = eng_.keygen(kClientKey);
  x_ = std::move(x);
  note("x", encode_slots(x_));
}

void ClientParty::note(const std::string& label, const std::vector<uint8_t>& data) {
  view_.push_back(ViewEntry{label, data});
}

std::vector<Envelope> ClientParty::abort_to_provider(const std::string& reason) {
  status_ = PartyStatus::Aborted;
  abort_reason_ = reason;
  return {Envelope{5, 'C', 'P', Abort{reason}}};
}

Envelope ClientParty::submit() {
  MockCiphertext ct = eng_.encrypt(padded(x_, pub_.slots), kClientKey);
  return Envelope{0, 'C', 'P', SubmitInput{std::move(ct)}};
}

std::vector<Envelope> ClientParty::handle(const Envelope& env) {
  if (const auto* er = std::get_if<EvalResult>(&env.msg)) {
    (void)er;  // informational broadcast; the check flow drives decryption
    return {};
  }
  if (const auto* cr = std::get_if<CheckRequest>(&env.msg)) {
    if (cr->provider_share.ciphertext_digest != cr->masked_ct.digest())
      return abort_to_provider("provider share does not match ciphertext");
    SlotVector plain;
    try {
      plain = eng_.combine({cr->provider_share}, cr->masked_ct, &sk_);
    } catch (const std::exception& e) {
      return abort_to_provider(e.what());
    }
    if (pub_.mode == Mode::Legacy) {
      result_.assign(plain.begin(), plain.begin() + static_cast<long>(pub_.d));
      note("combined", encode_slots(plain));
      note("result", encode_slots(result_));
      status_ = PartyStatus::Delivered;
      return {};
    }
    masked_plain_ = std::move(plain);
    canary_positions_ = cr->canary_positions;
    note("masked", encode_slots(masked_plain_));
    std::vector<int64_t> cells;
    cells.reserve(canary_positions_.size());
    for (uint32_t pos : canary_positions_) {
      if (pos >= pub_.slots) return abort_to_provider("canary position out of range");
      cells.push_back(quantize(masked_plain_[pos], pub_.quant_step));
    }
    Digest32 h = strategy_.kind == StrategyKind::LyingClient
                     ? lying_client_digest(strategy_.seed)
                     : check_hash(cells);
    return {Envelope{5, 'C', 'P', CheckResponse{h}}};
  }
  if (const auto* um = std::get_if<Unmask>(&env.msg)) {
    size_t width = pub_.d + pub_.m;
    if (masked_plain_.empty()) return abort_to_provider("unmask before check");
    if (um->rand.size() != width || um->perm.size() != width)
      return abort_to_provider("unmask vector has wrong width");
    for (double r : um->rand)
      if (std::fabs(r) < pub_.r_min)
        return abort_to_provider("mask entry below floor");
    SlotVector unmasked(width);
    for (size_t i = 0; i < width; ++i) unmasked[i] = masked_plain_[i] / um->rand[i];
    result_.resize(pub_.d);
    for (size_t s = 0; s < pub_.d; ++s) result_[s] = unmasked[um->perm.forward[s]];
    note("result", encode_slots(result_));
    status_ = PartyStatus::Delivered;
    return {};
  }
  if (const auto* ab = std::get_if<Abort>(&env.msg)) {
    status_ = PartyStatus::Aborted;
    abort_reason_ = ab->reason;
    return {};
  }
  return abort_to_provider("unexpected message for client");
}

// ---- provider ----

ProviderParty::ProviderParty(const PublicParams& pub, uint64_t engine_seed,
                             SlotwiseModel f, const DerivedSeeds& seeds,
                             StrategySpec strategy, ProviderHooks hooks)
    : pub_(pub),
      eng_(pub.slots, NoiseModel{pub.eta0, pub.sigma, engine_seed}),
      f_(std::move(f)),
      seeds_(seeds),
      strategy_(strategy),
      hooks_(std::move(hooks)) {
  f_.validate();
  if (f_.width() != pub.d)
    throw std::invalid_argument("model width must equal d");
  if (f_.degree() != pub.degree)
    throw std::invalid_argument("model degree differs from scenario degree");
  sk_ = eng_.keygen(kProviderKey);
  for (const SlotVector& row : f_.coeffs) note("f", encode_slots(row));
}

void ProviderParty::note(const std::string& label,
                         const std::vector<uint8_t>& data) {
  view_.push_back(ViewEntry{label, data});
}

SlotVector ProviderParty::draw_canaries() {
  Rng ry(seeds_.y);
  SlotVector y(pub_.m);
  for (size_t j = 0; j < pub_.m; ++j) {
    for (int attempt = 0;; ++attempt) {
      y[j] = ry.uniform(pub_.input_lo, pub_.input_hi);
      if (!pub_.boundary_avoidance) break;
      double masked = eval_slot(g_, j, y[j]) * rand_[plan_.chosen[j]];
      if (cell_edge_distance(masked, pub_.quant_step) >= pub_.quant_step / 4)
        break;
      // A nearly flat slot polynomial can pin the masked value near an
      // edge for every y; redraw that slot's coefficients and keep going.
      if (attempt > 0 && attempt % 100 == 0)
        for (SlotVector& row : g_.coeffs)
          row[j] = ry.uniform(pub_.input_lo, pub_.input_hi);
      if (attempt >= 10000)
        throw std::runtime_error("cannot place canary away from a cell edge");
    }
  }
  return y;
}

Digest32 ProviderParty::expected_hash() const {
  std::vector<int64_t> cells;
  cells.reserve(pub_.m);
  for (size_t j = 0; j < pub_.m; ++j) {
    double masked = eval_slot(g_, j, y_[j]) * rand_[plan_.chosen[j]];
    cells.push_back(quantize(masked, pub_.quant_step));
  }
  return check_hash(cells);
}

std::vector<Envelope> ProviderParty::handle(const Envelope& env) {
  if (const auto* si = std::get_if<SubmitInput>(&env.msg)) {
    EvalRequest req;
    req.degree = static_cast<uint32_t>(pub_.degree);
    if (pub_.mode == Mode::Legacy) {
      req.input_ct = si->ct;
      for (const SlotVector& row : f_.coeffs)
        req.param_cts.push_back(eng_.encrypt(padded(row, pub_.slots), kProviderKey));
      status_ = PartyStatus::InFlight;
      return {Envelope{1, 'P', 'S', std::move(req)}};
    }
    plan_ = hooks_.forced_plan ? *hooks_.forced_plan
                               : plan_shuffle(pub_.d, pub_.m, seeds_.plan);
    g_ = random_model(pub_.m, pub_.degree, pub_.input_lo, pub_.input_hi,
                      seeds_.model_g);
    rand_ = hooks_.forced_rand
                ? padded(*hooks_.forced_rand, pub_.slots)
                : gen_mask(pub_.slots, pub_.d + pub_.m, pub_.r_min,
                           seeds_.rand_mask);
    if (hooks_.forced_rand)
      for (size_t i = pub_.d + pub_.m; i < pub_.slots; ++i) rand_[i] = 1.0;
    y_ = draw_canaries();
    {
      std::vector<uint8_t> plan_bytes;
      for (uint32_t c : plan_.chosen) put_u32le(plan_bytes, c);
      for (uint32_t v : plan_.pi.forward) put_u32le(plan_bytes, v);
      note("plan", plan_bytes);
    }
    for (const SlotVector& row : g_.coeffs) note("g", encode_slots(row));
    note("y", encode_slots(y_));
    note("rand", encode_slots(rand_));

    MockCiphertext shuffled = shuffle_ciphertext(eng_, si->ct, plan_);
    req.input_ct = insert_canaries(eng_, shuffled, y_, plan_, kProviderKey);
    for (const SlotVector& row : permute_parameters(f_.coeffs, g_.coeffs, plan_))
      req.param_cts.push_back(eng_.encrypt(padded(row, pub_.slots), kProviderKey));
    return {Envelope{1, 'P', 'S', std::move(req)}};
  }

  if (const auto* er = std::get_if<EvalResult>(&env.msg)) {
    KeySet expect;
    expect.insert(kClientKey);
    expect.insert(kProviderKey);
    if (er->result_ct.keyset != expect) {
      status_ = PartyStatus::Aborted;
      abort_reason_ = "result ciphertext under wrong keyset";
      return {Envelope{4, 'P', 'C', Abort{abort_reason_}}};
    }
    if (pub_.mode == Mode::Legacy) {
      PartialShare share = eng_.partial_dec(er->result_ct, sk_);
      status_ = PartyStatus::Completed;
      return {Envelope{4, 'P', 'C', CheckRequest{er->result_ct, share, {}}}};
    }
    MockCiphertext masked = eng_.mult(er->result_ct, rand_);
    PartialShare share = eng_.partial_dec(masked, sk_);
    std::vector<uint32_t> positions =
        strategy_.kind == StrategyKind::MaliciousProviderIndices
            ? malicious_provider_indices(plan_, pub_.m)
            : plan_.chosen;
    return {Envelope{4, 'P', 'C',
                     CheckRequest{std::move(masked), share, std::move(positions)}}};
  }

  if (const auto* cr = std::get_if<CheckResponse>(&env.msg)) {
    Digest32 expect = expected_hash();
    note("check-expected", digest_bytes(expect));
    if (strategy_.kind == StrategyKind::MaliciousProviderIndices) {
      gain_ = cr->hash;
      note("gain-digest", digest_bytes(cr->hash));
    }
    if (cr->hash == expect) {
      status_ = PartyStatus::Completed;
      SlotVector rand_head(rand_.begin(),
                           rand_.begin() + static_cast<long>(pub_.d + pub_.m));
      return {Envelope{6, 'P', 'C', Unmask{std::move(rand_head), plan_.pi}}};
    }
    detected_ = true;
    status_ = PartyStatus::Aborted;
    abort_reason_ = "result check failed";
    return {Envelope{6, 'P', 'C', Abort{abort_reason_}}};
  }

  if (const auto* ab = std::get_if<Abort>(&env.msg)) {
    status_ = PartyStatus::Aborted;
    abort_reason_ = ab->reason;
    return {};
  }

  status_ = PartyStatus::Aborted;
  abort_reason_ = "unexpected message for provider";
  return {Envelope{4, 'P', 'C', Abort{abort_reason_}}};
}

// ---- server ----

ServerParty::ServerParty(const PublicParams& pub, uint64_t engine_seed,
                         StrategySpec strategy,
                         std::optional<std::vector<uint32_t>> forced_stolen)
    : pub_(pub),
      eng_(pub.slots, NoiseModel{pub.eta0, pub.sigma, engine_seed}),
      strategy_(strategy),
      forced_stolen_(std::move(forced_stolen)) {}

std::vector<Envelope> ServerParty::handle(const Envelope& env) {
  const auto* req = std::get_if<EvalRequest>(&env.msg);
  if (req == nullptr) return {};
  MockCiphertext result;
  switch (strategy_.kind) {
    case StrategyKind::BaselineSilverPlatter:
      result = baseline_silver_platter(eng_, *req, strategy_.round);
      break;
    case StrategyKind::OneShotTheft:
    case StrategyKind::PerRoundTheft: {
      size_t k = strategy_.kind == StrategyKind::OneShotTheft ? strategy_.k : 1;
      stolen_ = forced_stolen_ ? *forced_stolen_
                               : choose_theft_slots(pub_.d + pub_.m, k,
                                                    strategy_.seed);
      result = overwrite_slots(eng_, *req, stolen_);
      break;
    }
    default:
      result = eval_encrypted(eng_, req->param_cts, req->input_ct);
      break;
  }
  return {Envelope{2, 'S', 'P', EvalResult{result}},
          Envelope{3, 'S', 'C', EvalResult{std::move(result)}}};
}

// ---- driver ----

ScenarioInputs derive_inputs(const Scenario& sc, const RunOptions& opts) {
  const PublicParams& pub = sc.pub;
  ScenarioInputs in;
  in.seeds = sc.seeds();
  in.f = opts.f_override ? *opts.f_override
                         : random_model(pub.d, pub.degree, pub.input_lo,
                                        pub.input_hi, in.seeds.model_f);
  if (opts.x_override) {
    in.x = *opts.x_override;
  } else {
    Rng rx(in.seeds.x);
    in.x.resize(pub.d);
    for (double& v : in.x) v = rx.uniform(pub.input_lo, pub.input_hi);
  }
  in.strategy = sc.strategy;
  in.strategy.seed = in.seeds.strategy;
  return in;
}

RunResult run_in_process(const Scenario& sc, const RunOptions& opts) {
  const PublicParams& pub = sc.pub;
  ScenarioInputs in = derive_inputs(sc, opts);
  DerivedSeeds seeds = in.seeds;
  SlotVector x = in.x;
  SlotwiseModel f = in.f;
  StrategySpec strategy = in.strategy;

  ClientParty client(pub, seeds.client_engine, x, strategy);
  ProviderParty provider(pub, seeds.provider_engine, f, seeds, strategy,
                         opts.provider_hooks);
  ServerParty server(pub, seeds.server_engine, strategy,
                     opts.forced_stolen_slots);

  RunResult rr;
  std::deque<Envelope> queue;
  queue.push_back(client.submit());
  while (!queue.empty()) {
    Envelope env = std::move(queue.front());
    queue.pop_front();
    rr.transcript.entries.push_back(make_entry(env, opts.debug_payloads));
    std::vector<Envelope> outs;
    switch (env.receiver) {
      case 'C': outs = client.handle(env); break;
      case 'P': outs = provider.handle(env); break;
      case 'S': outs = server.handle(env); break;
      default: throw std::logic_error("envelope routed to unknown party");
    }
    for (Envelope& e : outs) queue.push_back(std::move(e));
  }

  rr.transcript.views['C'] = client.view();
  rr.transcript.views['P'] = provider.view();
  rr.transcript.views['S'] = {};
  rr.x = std::move(x);
  rr.f = std::move(f);
  rr.g = provider.g();
  rr.y = provider.y();
  rr.mask = provider.mask();
  rr.plan = provider.plan();
  rr.stolen_slots = server.stolen_slots();
  rr.provider_detected = provider.detected();
  rr.provider_gain = provider.gained_digest();
  rr.client_stats = client.engine_stats();
  rr.provider_stats = provider.engine_stats();
  rr.server_stats = server.engine_stats();

  if (client.status() == PartyStatus::Delivered) {
    rr.status = RunStatus::Delivered;
    rr.delivered = client.result();
  } else if (client.status() == PartyStatus::Aborted ||
             provider.status() == PartyStatus::Aborted) {
    rr.status = RunStatus::Aborted;
    rr.abort_reason = provider.status() == PartyStatus::Aborted
                          ? provider.abort_reason()
                          : client.abort_reason();
  } else {
    rr.status = RunStatus::TransportFailure;
    rr.abort_reason = "protocol stalled";
  }
  return rr;
}

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Delivered: return "Delivered";
    case RunStatus::Aborted: return "Aborted";
    case RunStatus::TransportFailure: return "TransportFailure";
  }
  return "TransportFailure";
}

AttackOutcome assess_attack(const Scenario& sc, const RunResult& run) {
  AttackOutcome out;
  out.aborted = run.status == RunStatus::Aborted;
  out.detected = run.provider_detected;
  out.rounds_used = 1;
  if (run.status != RunStatus::Delivered || run.delivered.empty()) return out;

  double tol = std::max(1e-9, 16.0 * sc.analytic_noise_bound() / sc.pub.r_min);
  const SlotVector& a0 = run.f.coeffs[0];
  switch (sc.strategy.kind) {
    case StrategyKind::BaselineSilverPlatter: {
      const SlotVector& row = run.f.coeffs[sc.strategy.round % run.f.coeffs.size()];
      for (size_t s = 0; s < sc.pub.d; ++s)
        if (std::fabs(run.delivered[s] - row[s]) <= tol) ++out.parameters_leaked;
      break;
    }
    case StrategyKind::OneShotTheft:
    case StrategyKind::PerRoundTheft: {
      for (uint32_t t : run.stolen_slots) {
        size_t s = sc.pub.mode == Mode::Legacy ? t : run.plan.pi.inverse[t];
        if (s < sc.pub.d && std::fabs(run.delivered[s] - a0[s]) <= tol)
          ++out.parameters_leaked;
      }
      break;
    }
    default:
      break;
  }
  return out;
}

}  // namespace sonni
