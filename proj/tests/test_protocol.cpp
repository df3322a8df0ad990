#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sonni/harness.hpp"
#include "sonni/protocol.hpp"
#include "sonni/shuffle.hpp"
#include "sonni/transcript.hpp"
#include "sonni/workload.hpp"
#include "test_support.hpp"

using namespace sonni;
using test::random_slots;

namespace {

Scenario small_scenario(Mode mode = Mode::Sonni) {
  Scenario sc;
  sc.pub.slots = 32;
  sc.pub.d = 12;
  sc.pub.m = mode == Mode::Sonni ? 4 : 0;
  sc.pub.degree = 2;
  sc.pub.mode = mode;
  sc.master_seed = 77;
  return sc;
}

double delivery_tol(const Scenario& sc) {
  return 4.0 * sc.analytic_noise_bound() / sc.pub.r_min + 1e-12;
}

const TranscriptEntry& entry_at(const RunResult& rr, uint32_t seq) {
  for (const TranscriptEntry& e : rr.transcript.entries)
    if (e.seq == seq) return e;
  throw std::out_of_range("no transcript entry with that seq");
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("quantize matches a floor reference and rounds half up") {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    double step = std::exp(rng.uniform(-8.0, 1.0));
    double v = rng.uniform(-50.0, 50.0);
    CHECK(quantize(v, step) ==
          static_cast<int64_t>(std::floor(v / step + 0.5)));
  }
  CHECK(quantize(0.0, 1.0) == 0);
  CHECK(quantize(0.5, 1.0) == 1);
  CHECK(quantize(-0.5, 1.0) == 0);
  CHECK(quantize(-0.51, 1.0) == -1);
  CHECK(quantize(2.49, 1.0) == 2);
  CHECK(quantize(0.0015, 1e-3) == 2);
  CHECK_THROWS_AS(quantize(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quantize(1.0, -1e-3), std::invalid_argument);
}

TEST_CASE("check_hash is a domain separated digest over little endian cells") {
  std::vector<int64_t> cells = {0, -1, 7, 1LL << 40, -(1LL << 40)};
  std::vector<uint8_t> buf;
  buf.push_back(0x43);
  for (int64_t c : cells) put_i64le(buf, c);
  CHECK(check_hash(cells) == sha256(buf));

  CHECK(check_hash(cells) == check_hash(cells));
  std::vector<int64_t> reordered = {-1, 0, 7, 1LL << 40, -(1LL << 40)};
  CHECK(check_hash(cells) != check_hash(reordered));
  std::vector<int64_t> tweaked = cells;
  tweaked[2] = 8;
  CHECK(check_hash(cells) != check_hash(tweaked));
  CHECK(check_hash({}) != check_hash({0}));
}

TEST_CASE("gen_mask keeps entries off the floor and pads with ones") {
  SlotVector r = gen_mask(32, 20, 0.25, 99);
  REQUIRE(r.size() == 32);
  for (size_t i = 0; i < 20; ++i) {
    CHECK(std::fabs(r[i]) >= 0.25);
    CHECK(std::fabs(r[i]) <= 1.0);
  }
  for (size_t i = 20; i < 32; ++i) CHECK(r[i] == 1.0);
  CHECK(gen_mask(32, 20, 0.25, 99) == r);
  CHECK(gen_mask(32, 20, 0.25, 100) != r);
  CHECK_THROWS_AS(gen_mask(8, 9, 0.1, 1), std::invalid_argument);
}

TEST_CASE("cell_edge_distance agrees with explicit edges") {
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    double step = std::exp(rng.uniform(-6.0, 0.0));
    double v = rng.uniform(-20.0, 20.0);
    double q = static_cast<double>(quantize(v, step));
    double lower = (q - 0.5) * step, upper = (q + 0.5) * step;
    double want = std::min(v - lower, upper - v);
    CHECK(cell_edge_distance(v, step) == doctest::Approx(want).epsilon(1e-9));
  }
  CHECK(cell_edge_distance(0.0005, 1e-3) == doctest::Approx(0.0));
  CHECK(cell_edge_distance(0.001, 1e-3) == doctest::Approx(0.0005));
}

TEST_CASE("honest run delivers the model evaluated at the input") {
  Scenario sc = small_scenario();
  sc.validate();
  RunResult rr = run_in_process(sc);
  REQUIRE(rr.status == RunStatus::Delivered);
  CHECK(rr.abort_reason.empty());
  REQUIRE(rr.delivered.size() == sc.pub.d);
  SlotVector want = eval_plain(rr.f, rr.x);
  CHECK(max_abs_diff(rr.delivered, want) <= delivery_tol(sc));

  // Full flow: 0 submit, 1 eval request, 2+3 results, 4 check request,
  // 5 check response, 6 unmask.
  REQUIRE(rr.transcript.entries.size() == 7);
  const MsgTag tags[] = {MsgTag::SubmitInput,  MsgTag::EvalRequest,
                         MsgTag::EvalResult,   MsgTag::EvalResult,
                         MsgTag::CheckRequest, MsgTag::CheckResponse,
                         MsgTag::Unmask};
  const char send[] = {'C', 'P', 'S', 'S', 'P', 'C', 'P'};
  const char recv[] = {'P', 'S', 'P', 'C', 'C', 'P', 'C'};
  for (size_t i = 0; i < 7; ++i) {
    CHECK(rr.transcript.entries[i].seq == i);
    CHECK(rr.transcript.entries[i].tag == tags[i]);
    CHECK(rr.transcript.entries[i].sender == send[i]);
    CHECK(rr.transcript.entries[i].receiver == recv[i]);
    CHECK(rr.transcript.entries[i].frame_len > 0);
  }
  CHECK(rr.transcript.views.at('C').front().label == "x");
  CHECK(!rr.transcript.views.at('P').empty());
  CHECK(rr.provider_detected == false);
  CHECK(rr.client_stats.encrypts >= 1);
  CHECK(rr.server_stats.mults >= sc.pub.degree);
  CHECK(std::string(run_status_name(rr.status)) == "Delivered");
}

TEST_CASE("check digests do not depend on the client input") {
  Scenario sc = small_scenario();
  sc.validate();
  Rng rng(8);
  for (int pair = 0; pair < 4; ++pair) {
    sc.master_seed = 500 + pair;
    RunOptions o1, o2;
    o1.x_override = random_slots(rng, sc.pub.d);
    o2.x_override = random_slots(rng, sc.pub.d);
    RunResult r1 = run_in_process(sc, o1);
    RunResult r2 = run_in_process(sc, o2);
    REQUIRE(r1.status == RunStatus::Delivered);
    REQUIRE(r2.status == RunStatus::Delivered);
    // Input-bearing frames differ; the check response and unmask frames
    // are byte-identical because canary cells never touch x.
    CHECK(entry_at(r1, 0).payload_digest != entry_at(r2, 0).payload_digest);
    CHECK(entry_at(r1, 4).payload_digest != entry_at(r2, 4).payload_digest);
    CHECK(entry_at(r1, 5).payload_digest == entry_at(r2, 5).payload_digest);
    CHECK(entry_at(r1, 6).payload_digest == entry_at(r2, 6).payload_digest);
    CHECK(r1.delivered != r2.delivered);
  }
}

TEST_CASE("tampering a canary destination aborts, an x destination leaks") {
  Scenario sc = small_scenario();
  sc.strategy.kind = StrategyKind::OneShotTheft;
  sc.strategy.k = 1;
  sc.validate();
  ShufflePlan plan = plan_shuffle(sc.pub.d, sc.pub.m, sc.seeds().plan);

  RunOptions hit;
  hit.forced_stolen_slots = std::vector<uint32_t>{plan.chosen[1]};
  RunResult tripped = run_in_process(sc, hit);
  CHECK(tripped.status == RunStatus::Aborted);
  CHECK(tripped.provider_detected);
  CHECK(tripped.abort_reason == "result check failed");
  CHECK(tripped.transcript.entries.back().tag == MsgTag::Abort);
  AttackOutcome caught = assess_attack(sc, tripped);
  CHECK(caught.detected);
  CHECK(caught.aborted);
  CHECK(caught.parameters_leaked == 0);

  uint32_t x_dest = 0;
  while (std::count(plan.chosen.begin(), plan.chosen.end(), x_dest)) ++x_dest;
  RunOptions miss;
  miss.forced_stolen_slots = std::vector<uint32_t>{x_dest};
  RunResult slipped = run_in_process(sc, miss);
  REQUIRE(slipped.status == RunStatus::Delivered);
  CHECK(!slipped.provider_detected);
  AttackOutcome theft = assess_attack(sc, slipped);
  CHECK(theft.parameters_leaked == 1);
  size_t s = plan.pi.inverse[x_dest];
  CHECK(std::fabs(slipped.delivered[s] - slipped.f.coeffs[0][s]) <=
        delivery_tol(sc));
}

TEST_CASE("legacy flow ends at the check request") {
  Scenario sc = small_scenario(Mode::Legacy);
  sc.validate();
  RunResult rr = run_in_process(sc);
  REQUIRE(rr.status == RunStatus::Delivered);
  REQUIRE(rr.transcript.entries.size() == 5);
  CHECK(rr.transcript.entries.back().seq == 4);
  CHECK(rr.transcript.entries.back().tag == MsgTag::CheckRequest);
  CHECK(max_abs_diff(rr.delivered, eval_plain(rr.f, rr.x)) <=
        delivery_tol(sc));
}

TEST_CASE("the baseline substitution leaks every parameter in legacy mode") {
  Scenario sc = small_scenario(Mode::Legacy);
  sc.strategy.kind = StrategyKind::BaselineSilverPlatter;
  sc.validate();
  for (size_t round = 0; round < 3; ++round) {
    sc.strategy.round = round;
    RunResult rr = run_in_process(sc);
    REQUIRE(rr.status == RunStatus::Delivered);
    CHECK(!rr.provider_detected);
    AttackOutcome out = assess_attack(sc, rr);
    CHECK(out.parameters_leaked == sc.pub.d);
    CHECK(!out.aborted);
    const SlotVector& row = rr.f.coeffs[round];
    for (size_t s = 0; s < sc.pub.d; ++s)
      CHECK(std::fabs(rr.delivered[s] - row[s]) <= delivery_tol(sc));
  }
}

TEST_CASE("a lying client is detected by the provider") {
  Scenario sc = small_scenario();
  sc.strategy.kind = StrategyKind::LyingClient;
  sc.validate();
  RunResult rr = run_in_process(sc);
  CHECK(rr.status == RunStatus::Aborted);
  CHECK(rr.provider_detected);
  CHECK(rr.abort_reason == "result check failed");
  // The fabricated digest is a pure function of the strategy seed.
  CHECK(lying_client_digest(9) == lying_client_digest(9));
  CHECK(lying_client_digest(9) != lying_client_digest(10));
}

TEST_CASE("a malicious provider harvests exactly one digest of masked cells") {
  Scenario sc = small_scenario();
  sc.strategy.kind = StrategyKind::MaliciousProviderIndices;
  sc.validate();
  RunResult rr = run_in_process(sc);
  // The swapped positions hash differently from the canary cells, so the
  // session aborts; all the provider gains is the one digest.
  CHECK(rr.status == RunStatus::Aborted);
  REQUIRE(rr.provider_gain.has_value());

  std::vector<uint32_t> positions = malicious_provider_indices(rr.plan, sc.pub.m);
  std::vector<int64_t> cells;
  for (uint32_t pos : positions) {
    size_t s = rr.plan.pi.inverse[pos];
    double masked = eval_slot(rr.f, s, rr.x[s]) * rr.mask[pos];
    cells.push_back(quantize(masked, sc.pub.quant_step));
  }
  CHECK(*rr.provider_gain == check_hash(cells));

  // Honest runs never populate the gain.
  Scenario honest = small_scenario();
  CHECK(!run_in_process(honest).provider_gain.has_value());
}

TEST_CASE("client rejects malformed check and unmask traffic") {
  PublicParams pub = small_scenario().pub;
  Engine aux(pub.slots, NoiseModel{pub.eta0, pub.sigma, 5});
  aux.keygen(kProviderKey);
  MockCiphertext ct = aux.encrypt(SlotVector(pub.slots, 0.5), kProviderKey);

  SUBCASE("share digest mismatch") {
    ClientParty client(pub, 6, SlotVector(pub.d, 0.1));
    PartialShare share;
    share.ciphertext_digest.fill(0xab);
    auto outs = client.handle(
        Envelope{4, 'P', 'C', CheckRequest{ct, share, {}}});
    REQUIRE(outs.size() == 1);
    CHECK(outs[0].seq == 5);
    CHECK(message_tag(outs[0].msg) == MsgTag::Abort);
    CHECK(client.status() == PartyStatus::Aborted);
    CHECK(client.abort_reason() == "provider share does not match ciphertext");
  }
  SUBCASE("unmask before check") {
    ClientParty client(pub, 6, SlotVector(pub.d, 0.1));
    std::vector<uint32_t> iota(pub.d + pub.m);
    for (uint32_t i = 0; i < iota.size(); ++i) iota[i] = i;
    auto outs = client.handle(Envelope{
        6, 'P', 'C', Unmask{SlotVector(pub.d + pub.m, 0.5),
                            Permutation::from_forward(iota)}});
    REQUIRE(outs.size() == 1);
    CHECK(client.abort_reason() == "unmask before check");
  }
  SUBCASE("unexpected message") {
    ClientParty client(pub, 6, SlotVector(pub.d, 0.1));
    client.handle(Envelope{1, 'P', 'C', EvalRequest{}});
    CHECK(client.status() == PartyStatus::Aborted);
    CHECK(client.abort_reason() == "unexpected message for client");
  }
  SUBCASE("mask entries below the floor are refused") {
    // Drive a full honest exchange but replace the provider's mask
    // disclosure with a sub-floor vector.
    Scenario sc = small_scenario();
    RunResult rr = run_in_process(sc);
    REQUIRE(rr.status == RunStatus::Delivered);

    ScenarioInputs in = derive_inputs(sc);
    ClientParty client(sc.pub, in.seeds.client_engine, in.x, in.strategy);
    ProviderParty provider(sc.pub, in.seeds.provider_engine, in.f, in.seeds,
                           in.strategy);
    ServerParty server(sc.pub, in.seeds.server_engine, in.strategy);
    Envelope e0 = client.submit();
    auto req = provider.handle(e0);
    auto results = server.handle(req[0]);
    auto check = provider.handle(results[0]);
    auto resp = client.handle(check[0]);
    auto unmask = provider.handle(resp[0]);
    REQUIRE(message_tag(unmask[0].msg) == MsgTag::Unmask);
    Unmask bad = std::get<Unmask>(unmask[0].msg);
    bad.rand[2] = sc.pub.r_min / 2;
    client.handle(Envelope{6, 'P', 'C', bad});
    CHECK(client.status() == PartyStatus::Aborted);
    CHECK(client.abort_reason() == "mask entry below floor");

    Unmask narrow = std::get<Unmask>(unmask[0].msg);
    narrow.rand.pop_back();
    ClientParty again(sc.pub, in.seeds.client_engine, in.x, in.strategy);
    again.submit();
    again.handle(check[0]);
    again.handle(Envelope{6, 'P', 'C', narrow});
    CHECK(again.abort_reason() == "unmask vector has wrong width");
  }
}

TEST_CASE("boundary avoidance keeps honest runs clear of cell edges") {
  Scenario sc = small_scenario();
  sc.validate();
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    sc.master_seed = seed;
    CHECK(run_in_process(sc).status == RunStatus::Delivered);
  }

  // Negative control: coarse noise with avoidance disabled makes the
  // client and provider land in different cells on some canary.
  Scenario coarse = small_scenario();
  coarse.pub.eta0 = 2e-4;
  coarse.pub.sigma = 2e-4;
  coarse.pub.boundary_avoidance = false;
  size_t false_aborts = 0;
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    coarse.master_seed = seed;
    RunResult rr = run_in_process(coarse);
    if (rr.status == RunStatus::Aborted) {
      ++false_aborts;
      CHECK(rr.abort_reason == "result check failed");
    }
  }
  CHECK(false_aborts > 0);
}

TEST_CASE("per round campaign accumulates one leak per undetected round") {
  Scenario sc = small_scenario();
  sc.strategy.kind = StrategyKind::PerRoundTheft;
  sc.validate();
  AttackOutcome out = per_round_campaign(sc, 60);
  CHECK(out.rounds_used <= 60);
  // Detection odds are m/(d+m) = 1/4 per round, so 60 rounds all clean
  // has probability 0.75^60; this seed gets caught.
  CHECK(out.aborted);
  CHECK(out.detected);
  CHECK(out.parameters_leaked == out.rounds_used - 1);
}

TEST_CASE("scenario validation names the violated invariant") {
  Scenario ok = small_scenario();
  ok.validate();

  auto expect_throw = [](Scenario sc) {
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  };
  Scenario sc = small_scenario();
  sc.pub.slots = 33;
  expect_throw(sc);
  sc = small_scenario();
  sc.pub.d = 31;
  sc.pub.m = 2;
  expect_throw(sc);
  sc = small_scenario();
  sc.pub.m = 0;
  expect_throw(sc);
  sc = small_scenario(Mode::Legacy);
  sc.pub.m = 1;
  expect_throw(sc);
  sc = small_scenario();
  sc.pub.degree = 0;
  expect_throw(sc);
  sc = small_scenario();
  sc.pub.input_lo = 1.0;
  sc.pub.input_hi = -1.0;
  expect_throw(sc);
  sc = small_scenario();
  sc.pub.quant_step = 0.0;
  expect_throw(sc);
  sc = small_scenario();
  sc.pub.r_min = 1.0;
  expect_throw(sc);
  sc = small_scenario();
  sc.pub.eta0 = -1e-9;
  expect_throw(sc);
  sc = small_scenario();
  sc.pub.eta0 = 1e-3;  // noise bound crosses the quantization gate
  expect_throw(sc);
  sc = small_scenario();
  sc.strategy.kind = StrategyKind::OneShotTheft;
  sc.strategy.k = sc.pub.d + sc.pub.m + 1;
  expect_throw(sc);
}

TEST_CASE("strategy and mode names round trip") {
  for (StrategyKind k : {StrategyKind::HonestServer,
                         StrategyKind::BaselineSilverPlatter,
                         StrategyKind::OneShotTheft,
                         StrategyKind::PerRoundTheft,
                         StrategyKind::MaliciousProviderIndices,
                         StrategyKind::LyingClient})
    CHECK(strategy_from_name(strategy_name(k)) == k);
  CHECK(mode_from_name(mode_name(Mode::Legacy)) == Mode::Legacy);
  CHECK(mode_from_name(mode_name(Mode::Sonni)) == Mode::Sonni);
  CHECK_THROWS_AS(strategy_from_name("nope"), std::invalid_argument);
  CHECK_THROWS_AS(mode_from_name("nope"), std::invalid_argument);
}

TEST_CASE("derived seeds are distinct and honor an explicit strategy seed") {
  Scenario sc = small_scenario();
  DerivedSeeds s = sc.seeds();
  std::vector<uint64_t> all = {s.client_engine, s.provider_engine,
                               s.server_engine, s.x,         s.model_f,
                               s.model_g,       s.y,         s.plan,
                               s.rand_mask,     s.strategy};
  std::sort(all.begin(), all.end());
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());

  sc.strategy.seed = 424242;
  CHECK(sc.seeds().strategy == 424242);
  Scenario other = sc;
  other.master_seed += 1;
  CHECK(other.seeds().x != sc.seeds().x);
}

}  // TEST_SUITE
