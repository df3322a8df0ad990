#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sonni/protocol.hpp"

namespace sonni {

// Loopback-style numeric addresses. The server listens for both peers; the
// provider listens for the client and dials the server; the client dials
// both.
struct TcpEndpoints {
  std::string server_host = "127.0.0.1";
  uint16_t server_port = 0;
  std::string provider_host = "127.0.0.1";
  uint16_t provider_port = 0;
};

struct ServeOptions {
  char party = 'S';
  Scenario scenario;
  TcpEndpoints endpoints;
  // Pre-bound listening socket from the orchestrator; -1 means bind the
  // party's own endpoint. Client never listens.
  int listen_fd = -1;
  std::string transcript_path;
  bool debug_payloads = false;
};

struct ServeResult {
  RunStatus status = RunStatus::TransportFailure;
  std::string abort_reason;
  SlotVector delivered;
  std::vector<TranscriptEntry> sent;
};

// 0 clean session, 2 aborted, 4 transport failure.
int exit_code_for(RunStatus status);

// Drives one party's state machine over TCP until its session ends. Frames
// it sends are logged to transcript_path; a malformed inbound frame closes
// the connection with an Abort entry logged.
ServeResult serve_party(const ServeOptions& opts);

struct TcpRunResult {
  RunStatus status = RunStatus::TransportFailure;
  int client_exit = -1, provider_exit = -1, server_exit = -1;
  std::string transcript_path;
  std::string transcript_text;
};

// Runs all three parties as local child processes on ephemeral ports and
// merges their per-party transcripts into workdir/transcript.txt.
TcpRunResult run_over_tcp(const Scenario& sc, const std::string& workdir,
                          bool debug_payloads = false);

}  // namespace sonni
