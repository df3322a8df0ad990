#pragma once

#include <string>

#include "sonni/analysis.hpp"
#include "sonni/protocol.hpp"
#include "sonni/transport.hpp"

namespace sonni {

struct ScenarioArtifacts {
  RunStatus status = RunStatus::TransportFailure;
  std::string abort_reason;
  SlotVector delivered;
  AttackOutcome outcome;
  std::string transcript_path;
  std::string outcome_csv_path;
  int exit_code = 4;
};

// Runs one scenario over the named transport ("in-process" or "tcp"),
// writes out_dir/transcript.txt, and appends a row to out_dir/outcomes.csv.
// Attack bookkeeping (leak counts) is available in-process only; over TCP
// the parties are separate processes and only the session outcome is known.
ScenarioArtifacts run_scenario(const Scenario& sc, const std::string& out_dir,
                               const std::string& transport,
                               bool debug_payloads = false);

// Repeated single-slot theft with a fresh session (fresh plan, mask, and
// canaries) per round; detection ends the campaign.
AttackOutcome per_round_campaign(const Scenario& sc, size_t rounds);

// Appends one Monte Carlo row to a CSV (header written when absent).
void append_attack_sim_row(const std::string& csv_path, Formula formula,
                           size_t d, size_t m, size_t k,
                           const MonteCarloEstimate& mc,
                           const ProbabilityResult& exact);

// Reproduction artifacts.
std::string table1_csv();
std::string table1_report();
std::string figure3_csv(size_t slots, const std::vector<size_t>& k_list,
                        size_t m_lo, size_t m_hi);

struct PaperClaims {
  ProbabilityResult per_round_16384;
  ProbabilityResult per_round_32768;
  double overhead = 0.0;
  bool ok = false;
};

// The d=1022, m=2 leak probabilities at k=16384 and k=32768 plus the
// 2/1024 slot overhead, checked against their published values within 1%.
PaperClaims paper_claims();
std::string paper_claims_report(const PaperClaims& pc);

}  // namespace sonni
