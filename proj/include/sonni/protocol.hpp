#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sonni/adversary.hpp"
#include "sonni/messages.hpp"
#include "sonni/scenario.hpp"
#include "sonni/workload.hpp"

namespace sonni {

// ---- result-check arithmetic ----

// Cell index of v under step-width quantization, rounding half up.
int64_t quantize(double v, double step);

// Domain-separated digest over little-endian cell indices, in the order the
// canary positions were named.
Digest32 check_hash(const std::vector<int64_t>& cells);

// Full-width mask vector: entries [0, width) are uniform in [-1,1] with
// |entry| >= r_min (rejection sampled), entries beyond width are 1 so the
// padding slots pass through untouched.
SlotVector gen_mask(size_t n_total, size_t width, double r_min, uint64_t seed);

// Distance from v to the nearest quantization-cell edge, in units of step.
double cell_edge_distance(double v, double step);

// ---- party state machines ----

enum class PartyStatus { InFlight, Delivered, Completed, Aborted };

// One labeled plaintext value a party held, for privacy audits.
struct ViewEntry {
  std::string label;
  std::vector<uint8_t> data;
  bool operator==(const ViewEntry&) const = default;
};

class ClientParty {
 public:
  ClientParty(const PublicParams& pub, uint64_t engine_seed, SlotVector x,
              StrategySpec strategy = {});

  Envelope submit();
  std::vector<Envelope> handle(const Envelope& env);

  PartyStatus status() const { return status_; }
  const std::string& abort_reason() const { return abort_reason_; }
  const SlotVector& result() const { return result_; }
  const std::vector<ViewEntry>& view() const { return view_; }
  const CallStats& engine_stats() const { return eng_.stats(); }

 private:
  std::vector<Envelope> abort_to_provider(const std::string& reason);
  void note(const std::string& label, const std::vector<uint8_t>& data);

  PublicParams pub_;
  Engine eng_;
  KeyPair sk_;
  SlotVector x_;
  StrategySpec strategy_;
  SlotVector masked_plain_;
  std::vector<uint32_t> canary_positions_;
  SlotVector result_;
  PartyStatus status_ = PartyStatus::InFlight;
  std::string abort_reason_;
  std::vector<ViewEntry> view_;
};

// Test hooks for the provider's private draws.
struct ProviderHooks {
  std::optional<ShufflePlan> forced_plan;
  std::optional<SlotVector> forced_rand;
};

class ProviderParty {
 public:
  ProviderParty(const PublicParams& pub, uint64_t engine_seed,
                SlotwiseModel f, const DerivedSeeds& seeds,
                StrategySpec strategy = {}, ProviderHooks hooks = {});

  std::vector<Envelope> handle(const Envelope& env);

  PartyStatus status() const { return status_; }
  const std::string& abort_reason() const { return abort_reason_; }
  bool detected() const { return detected_; }
  const std::vector<ViewEntry>& view() const { return view_; }
  const CallStats& engine_stats() const { return eng_.stats(); }

  // Ground-truth accessors for the harness and tests; no protocol message
  // ever carries these.
  const ShufflePlan& plan() const { return plan_; }
  const SlotwiseModel& g() const { return g_; }
  const SlotVector& y() const { return y_; }
  const SlotVector& mask() const { return rand_; }
  const std::optional<Digest32>& gained_digest() const { return gain_; }

 private:
  void note(const std::string& label, const std::vector<uint8_t>& data);
  SlotVector draw_canaries();
  Digest32 expected_hash() const;

  PublicParams pub_;
  Engine eng_;
  KeyPair sk_;
  SlotwiseModel f_;
  SlotwiseModel g_;
  SlotVector y_;
  ShufflePlan plan_;
  SlotVector rand_;
  DerivedSeeds seeds_;
  StrategySpec strategy_;
  ProviderHooks hooks_;
  PartyStatus status_ = PartyStatus::InFlight;
  std::string abort_reason_;
  bool detected_ = false;
  std::optional<Digest32> gain_;
  std::vector<ViewEntry> view_;
};

class ServerParty {
 public:
  ServerParty(const PublicParams& pub, uint64_t engine_seed,
              StrategySpec strategy = {},
              std::optional<std::vector<uint32_t>> forced_stolen = {});

  std::vector<Envelope> handle(const Envelope& env);

  const std::vector<uint32_t>& stolen_slots() const { return stolen_; }
  const CallStats& engine_stats() const { return eng_.stats(); }

 private:
  PublicParams pub_;
  Engine eng_;
  StrategySpec strategy_;
  std::optional<std::vector<uint32_t>> forced_stolen_;
  std::vector<uint32_t> stolen_;
};

// ---- in-process driver ----

enum class RunStatus { Delivered, Aborted, TransportFailure };

const char* run_status_name(RunStatus s);

struct TranscriptEntry {
  uint32_t seq = 0;
  char sender = 0;
  char receiver = 0;
  MsgTag tag = MsgTag::Abort;
  uint32_t frame_len = 0;
  Digest32 payload_digest{};
  uint64_t time_ns = 0;
  std::vector<uint8_t> body;  // captured only in debug mode
};

struct Transcript {
  std::vector<TranscriptEntry> entries;
  std::map<char, std::vector<ViewEntry>> views;
};

struct RunOptions {
  std::optional<SlotVector> x_override;
  std::optional<SlotwiseModel> f_override;
  ProviderHooks provider_hooks;
  std::optional<std::vector<uint32_t>> forced_stolen_slots;
  bool debug_payloads = false;
};

struct RunResult {
  RunStatus status = RunStatus::TransportFailure;
  std::string abort_reason;
  SlotVector delivered;
  Transcript transcript;

  // Ground truth and attack bookkeeping for tests and reports.
  SlotVector x;
  SlotwiseModel f;
  SlotwiseModel g;
  SlotVector y;
  SlotVector mask;
  ShufflePlan plan;
  std::vector<uint32_t> stolen_slots;
  bool provider_detected = false;
  std::optional<Digest32> provider_gain;
  CallStats client_stats, provider_stats, server_stats;
};

// Everything a party needs that is derived from the scenario alone. Both
// transports build parties from this, so runs match byte for byte.
struct ScenarioInputs {
  DerivedSeeds seeds;
  SlotVector x;
  SlotwiseModel f;
  StrategySpec strategy;
};

ScenarioInputs derive_inputs(const Scenario& sc, const RunOptions& opts = {});

RunResult run_in_process(const Scenario& sc, const RunOptions& opts = {});

// Counts delivered client plaintext slots matching true degree-0
// coefficients (the values theft strategies plant), then fills the
// AttackOutcome record from the run.
AttackOutcome assess_attack(const Scenario& sc, const RunResult& run);

}  // namespace sonni
