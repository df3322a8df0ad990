#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>

#include "sonni/harness.hpp"
#include "sonni/transcript.hpp"

namespace {

using namespace sonni;

// Scenario flags shared by run, serve, and attack-sim. --noise sets both
// noise parameters at once; --eta0/--sigma still win when given explicitly.
struct ScenarioCli {
  Scenario sc;
  std::string strategy = "honest";
  std::string mode = "sonni";
  double noise = 0.0, eta0 = 0.0, sigma = 0.0;
  bool no_avoidance = false;
  CLI::App* cmd = nullptr;

  void attach(CLI::App* c) {
    cmd = c;
    c->add_option("--slots", sc.pub.slots, "ciphertext slot count (power of two)");
    c->add_option("--d", sc.pub.d, "data slots");
    c->add_option("--m", sc.pub.m, "canary slots");
    c->add_option("--k", sc.strategy.k, "slots a theft strategy grabs");
    c->add_option("--degree", sc.pub.degree, "model polynomial degree");
    c->add_option("--quant-step", sc.pub.quant_step, "check quantization step");
    c->add_option("--noise", noise, "sets both eta0 and sigma");
    c->add_option("--eta0", eta0, "fresh-encryption noise bound");
    c->add_option("--sigma", sigma, "per-multiplication noise bound");
    c->add_option("--r-min", sc.pub.r_min, "mask magnitude floor");
    c->add_option("--input-lo", sc.pub.input_lo, "input range low edge");
    c->add_option("--input-hi", sc.pub.input_hi, "input range high edge");
    c->add_option("--strategy", strategy,
                  "honest, silver-platter, one-shot-theft, per-round-theft, "
                  "malicious-provider, lying-client");
    c->add_option("--mode", mode, "sonni or legacy");
    c->add_option("--seed", sc.master_seed, "master seed");
    c->add_option("--strategy-seed", sc.strategy.seed,
                  "adversary seed override");
    c->add_option("--round", sc.strategy.round, "attack round index");
    c->add_flag("--no-boundary-avoidance", no_avoidance,
                "draw canaries without quantization-edge resampling");
  }

  Scenario finalize() const {
    Scenario out = sc;
    out.strategy.kind = strategy_from_name(strategy);
    out.pub.mode = mode_from_name(mode);
    if (out.pub.mode == Mode::Legacy && cmd->count("--m") == 0) out.pub.m = 0;
    if (cmd->count("--noise")) {
      out.pub.eta0 = noise;
      out.pub.sigma = noise;
    }
    if (cmd->count("--eta0")) out.pub.eta0 = eta0;
    if (cmd->count("--sigma")) out.pub.sigma = sigma;
    out.pub.boundary_avoidance = !no_avoidance;
    return out;
  }
};

void parse_addr(const std::string& addr, std::string& host, uint16_t& port) {
  size_t colon = addr.rfind(':');
  if (colon == std::string::npos || colon + 1 >= addr.size())
    throw CLI::ValidationError("address must be host:port: " + addr);
  host = addr.substr(0, colon);
  port = uint16_t(std::stoul(addr.substr(colon + 1)));
}

void print_result_vector(const SlotVector& v) {
  std::printf("result=");
  for (double x : v) std::printf(" %.17g", x);
  std::printf("\n");
}

int cmd_run(const ScenarioCli& scli, const std::string& transport,
            const std::string& out_dir, size_t rounds, bool debug) {
  Scenario sc = scli.finalize();
  if (rounds > 1) {
    sc.validate();
    AttackOutcome agg = per_round_campaign(sc, rounds);
    std::printf("status=%s\n", agg.aborted ? "Aborted" : "Delivered");
    std::printf("leaked=%zu detected=%s rounds=%zu\n", agg.parameters_leaked,
                agg.detected ? "true" : "false", agg.rounds_used);
    return agg.aborted ? 2 : 0;
  }
  ScenarioArtifacts art = run_scenario(sc, out_dir, transport, debug);
  std::printf("status=%s\n", run_status_name(art.status));
  if (art.status == RunStatus::Aborted)
    std::printf("reason=%s\n", art.abort_reason.c_str());
  std::printf("leaked=%zu detected=%s rounds=%zu\n",
              art.outcome.parameters_leaked,
              art.outcome.detected ? "true" : "false",
              art.outcome.rounds_used);
  if (!art.delivered.empty()) print_result_vector(art.delivered);
  std::printf("transcript=%s\n", art.transcript_path.c_str());
  return art.exit_code;
}

Formula formula_from_flag(const std::string& name) {
  if (name == "one-shot-theft") return Formula::OneShot;
  if (name == "per-round-theft") return Formula::PerRound;
  return formula_from_name(name);
}

int cmd_attack_sim(const ScenarioCli& scli, const std::string& strategy,
                   uint64_t trials, const std::string& out_csv, bool serial,
                   bool protocol) {
  Formula formula = formula_from_flag(strategy);
  ScenarioCli named = scli;
  named.strategy =
      formula == Formula::OneShot ? "one-shot-theft" : "per-round-theft";
  const Scenario sc = named.finalize();
  size_t d = sc.pub.d, m = sc.pub.m, k = sc.strategy.k;
  uint64_t seed = sc.master_seed;
  MonteCarloEstimate mc;
  if (protocol) {
    mc = monte_carlo_protocol(sc, k, trials, seed);
    formula = Formula::OneShot;
  } else if (serial) {
    mc = monte_carlo_serial(formula, d, m, k, trials, seed);
  } else {
    mc = monte_carlo(formula, d, m, k, trials, seed);
  }
  ProbabilityResult exact = formula == Formula::OneShot
                                ? p_one_shot(d, m, k)
                                : p_per_round(d, m, k);
  double z = mc.stderr_ > 0.0 ? (mc.p_hat - exact.p) / mc.stderr_ : 0.0;
  std::printf(
      "formula=%s d=%zu m=%zu k=%zu trials=%llu successes=%llu "
      "p_hat=%.10g stderr=%.4g exact_p=%.10g exact_log10=%.10g z=%.3f\n",
      formula_name(formula), d, m, k, (unsigned long long)mc.trials,
      (unsigned long long)mc.successes, mc.p_hat, mc.stderr_, exact.p,
      exact.log10_p, z);
  append_attack_sim_row(out_csv, formula, d, m, k, mc, exact);
  return 0;
}

int cmd_serve(const ScenarioCli& scli, const std::string& party,
              const std::string& server_addr, const std::string& provider_addr,
              const std::string& transcript, bool debug) {
  ServeOptions opts;
  opts.scenario = scli.finalize();
  if (party == "client")
    opts.party = 'C';
  else if (party == "provider")
    opts.party = 'P';
  else if (party == "server")
    opts.party = 'S';
  else
    throw CLI::ValidationError("party must be client, provider, or server");
  parse_addr(server_addr, opts.endpoints.server_host,
             opts.endpoints.server_port);
  parse_addr(provider_addr, opts.endpoints.provider_host,
             opts.endpoints.provider_port);
  opts.transcript_path = transcript;
  opts.debug_payloads = debug;
  ServeResult res = serve_party(opts);
  std::printf("status=%s\n", run_status_name(res.status));
  if (!res.abort_reason.empty())
    std::printf("reason=%s\n", res.abort_reason.c_str());
  if (!res.delivered.empty()) print_result_vector(res.delivered);
  return exit_code_for(res.status);
}

int cmd_analyze_table1(const std::string& out_dir) {
  write_text_file(out_dir + "/table1.csv", table1_csv());
  std::string report = table1_report();
  write_text_file(out_dir + "/table1_report.txt", report);
  std::fputs(report.c_str(), stdout);
  return 0;
}

int cmd_analyze_fig3(const std::string& out_dir, size_t slots,
                     std::vector<size_t> ks, size_t m_lo, size_t m_hi) {
  if (ks.empty()) ks = {10, 128, 256, 512};
  if (m_hi == 0) m_hi = slots / 2;
  write_text_file(out_dir + "/fig3.csv", figure3_csv(slots, ks, m_lo, m_hi));
  std::printf("wrote %s/fig3.csv\n", out_dir.c_str());
  return 0;
}

int cmd_analyze_claims(const std::string& out_dir) {
  PaperClaims pc = paper_claims();
  std::string report = paper_claims_report(pc);
  write_text_file(out_dir + "/paper_claims.txt", report);
  std::fputs(report.c_str(), stdout);
  return pc.ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "simulator and analysis toolkit for checked outsourced inference"};
  app.set_config("--config", "",
                 "INI config file; sections name subcommands");
  app.require_subcommand(1);
  int rc = 0;

  ScenarioCli run_flags;
  CLI::App* run = app.add_subcommand("run", "execute one protocol session");
  run_flags.attach(run);
  std::string run_transport = "in-process", run_out = ".";
  size_t run_rounds = 1;
  bool run_debug = false;
  run->add_option("--transport", run_transport, "in-process or tcp");
  run->add_option("--out", run_out, "artifact directory");
  run->add_option("--rounds", run_rounds,
                  "repeat sessions for a multi-round campaign");
  run->add_flag("--debug-payloads", run_debug,
                "include full payload bytes in the transcript");
  run->callback([&] { rc = cmd_run(run_flags, run_transport, run_out,
                                   run_rounds, run_debug); });

  ScenarioCli sim_flags;
  sim_flags.strategy = "one-shot-theft";
  CLI::App* sim = app.add_subcommand(
      "attack-sim", "Monte Carlo estimate of attack success probability");
  sim_flags.attach(sim);
  uint64_t sim_trials = 1000000;
  std::string sim_out = "attack_sim.csv";
  bool sim_serial = false, sim_protocol = false;
  sim->add_option("--trials", sim_trials, "trial count");
  sim->add_option("--out", sim_out, "CSV to append");
  sim->add_flag("--serial", sim_serial, "use the serial reference sampler");
  sim->add_flag("--protocol", sim_protocol,
                "full protocol sessions instead of the fast sampler");
  sim->callback([&] {
    rc = cmd_attack_sim(sim_flags, sim_flags.strategy, sim_trials, sim_out,
                        sim_serial, sim_protocol);
  });

  CLI::App* analyze =
      app.add_subcommand("analyze", "reproduce published numbers");
  analyze->require_subcommand(1);
  std::string an_out = ".";
  analyze->add_option("--out", an_out, "artifact directory")
      ->configurable(false);
  CLI::App* table1 = analyze->add_subcommand("table1", "leak table");
  table1->fallthrough();
  table1->callback([&] { rc = cmd_analyze_table1(an_out); });
  CLI::App* fig3 = analyze->add_subcommand("fig3", "probability curves");
  fig3->fallthrough();
  size_t fig_slots = 1024, fig_mlo = 1, fig_mhi = 0;
  std::vector<size_t> fig_ks;
  fig3->add_option("--slots", fig_slots);
  fig3->add_option("--curve-k", fig_ks, "k values, one curve each");
  fig3->add_option("--m-lo", fig_mlo);
  fig3->add_option("--m-hi", fig_mhi);
  fig3->callback(
      [&] { rc = cmd_analyze_fig3(an_out, fig_slots, fig_ks, fig_mlo, fig_mhi); });
  CLI::App* claims =
      analyze->add_subcommand("paper-claims", "spot numeric claims");
  claims->fallthrough();
  claims->callback([&] { rc = cmd_analyze_claims(an_out); });

  ScenarioCli serve_flags;
  CLI::App* serve =
      app.add_subcommand("serve", "run one party over TCP until the session ends");
  serve_flags.attach(serve);
  std::string serve_party_name, serve_saddr = "127.0.0.1:7001",
                                serve_paddr = "127.0.0.1:7002",
                                serve_transcript;
  bool serve_debug = false;
  serve->add_option("--party", serve_party_name, "client, provider, or server")
      ->required();
  serve->add_option("--server-addr", serve_saddr, "server listen address");
  serve->add_option("--provider-addr", serve_paddr,
                    "provider listen address");
  serve->add_option("--out", serve_transcript, "per-party transcript file");
  serve->add_flag("--debug-payloads", serve_debug);
  serve->callback([&] {
    rc = cmd_serve(serve_flags, serve_party_name, serve_saddr, serve_paddr,
                   serve_transcript, serve_debug);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return rc;
}
