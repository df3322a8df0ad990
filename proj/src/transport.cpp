#include "sonni/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <map>
#include <stdexcept>
#include <thread>

#include "sonni/transcript.hpp"
#include "sonni/wire.hpp"

namespace sonni {

namespace {

constexpr uint32_t kMaxFrameBody = 1u << 26;
constexpr int kRecvTimeoutSec = 60;

sockaddr_in make_addr(const std::string& host, uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
    throw std::runtime_error("bad IPv4 address: " + host);
  return addr;
}

int tcp_listen(const std::string& host, uint16_t& port) {
  int fd = socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw std::runtime_error("socket: " + std::string(strerror(errno)));
  int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr = make_addr(host, port);
  if (bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      listen(fd, 8) != 0) {
    int err = errno;
    close(fd);
    throw std::runtime_error("listen on " + host + ": " + strerror(err));
  }
  socklen_t len = sizeof addr;
  if (getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    close(fd);
    throw std::runtime_error("getsockname failed");
  }
  port = ntohs(addr.sin_port);
  return fd;
}

int tcp_connect(const std::string& host, uint16_t port) {
  sockaddr_in addr = make_addr(host, port);
  for (int attempt = 0; attempt < 800; ++attempt) {
    int fd = socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) break;
    if (connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0)
      return fd;
    close(fd);
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  return -1;
}

void set_recv_timeout(int fd) {
  timeval tv{kRecvTimeoutSec, 0};
  setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

bool send_all(int fd, const uint8_t* p, size_t n) {
  while (n > 0) {
    ssize_t w = send(fd, p, n, MSG_NOSIGNAL);
    if (w <= 0) {
      if (w < 0 && errno == EINTR) continue;
      return false;
    }
    p += w;
    n -= size_t(w);
  }
  return true;
}

bool recv_exact(int fd, uint8_t* p, size_t n) {
  while (n > 0) {
    ssize_t r = recv(fd, p, n, 0);
    if (r <= 0) {
      if (r < 0 && errno == EINTR) continue;
      return false;
    }
    p += r;
    n -= size_t(r);
  }
  return true;
}

enum class RecvOutcome { Ok, Closed, Malformed };

RecvOutcome recv_msg(int fd, ProtocolMessage& out, std::string& err) {
  uint8_t header[4];
  if (!recv_exact(fd, header, 4)) {
    err = "connection closed";
    return RecvOutcome::Closed;
  }
  uint32_t n = frame_length(header);
  if (n == 0 || n > kMaxFrameBody) {
    err = "frame length out of range";
    return RecvOutcome::Malformed;
  }
  std::vector<uint8_t> body(n);
  if (!recv_exact(fd, body.data(), n)) {
    err = "connection closed mid-frame";
    return RecvOutcome::Closed;
  }
  try {
    out = decode_message(body);
  } catch (const std::exception& ex) {
    err = ex.what();
    return RecvOutcome::Malformed;
  }
  return RecvOutcome::Ok;
}

// Per-party plumbing: peer sockets, the send log, and synthesized inbound
// envelopes (seq and endpoints follow the fixed message flow, so the peer
// never needs to transmit them).
struct PartyIo {
  char self = 0;
  bool debug = false;
  std::map<char, int> fds;
  std::vector<TranscriptEntry> sent;
  ServeResult result;

  ~PartyIo() {
    for (auto& [party, fd] : fds)
      if (fd >= 0) close(fd);
  }

  bool send_env(const Envelope& env) {
    sent.push_back(make_entry(env, debug));
    std::vector<uint8_t> frame = encode_frame(env.msg);
    return send_all(fds.at(env.receiver), frame.data(), frame.size());
  }

  bool send_envs(const std::vector<Envelope>& outs) {
    for (const Envelope& e : outs)
      if (!send_env(e)) return false;
    return true;
  }

  // Fills env on success. On failure sets the final result: closed peer is
  // a transport failure; a malformed frame closes the session with an Abort
  // logged against the offending peer.
  bool receive(char peer, uint32_t seq, Envelope& env) {
    ProtocolMessage msg;
    std::string err;
    RecvOutcome rc = recv_msg(fds.at(peer), msg, err);
    if (rc == RecvOutcome::Ok) {
      env = Envelope{seq, peer, self, std::move(msg)};
      return true;
    }
    if (rc == RecvOutcome::Malformed) {
      Envelope ab{seq, self, peer, Abort{"malformed frame: " + err}};
      sent.push_back(make_entry(ab, debug));
      result.status = RunStatus::Aborted;
      result.abort_reason = "malformed frame: " + err;
    } else {
      result.status = RunStatus::TransportFailure;
      result.abort_reason = err;
    }
    return false;
  }

  void transport_failed(const std::string& why) {
    result.status = RunStatus::TransportFailure;
    result.abort_reason = why;
  }
};

int accept_peer(int listen_fd, char& party) {
  int fd = accept(listen_fd, nullptr, nullptr);
  if (fd < 0) return -1;
  set_recv_timeout(fd);
  uint8_t hello = 0;
  if (!recv_exact(fd, &hello, 1) || (hello != 'C' && hello != 'P')) {
    close(fd);
    return -1;
  }
  party = char(hello);
  return fd;
}

int dial_peer(const std::string& host, uint16_t port, char self) {
  int fd = tcp_connect(host, port);
  if (fd < 0) return -1;
  set_recv_timeout(fd);
  uint8_t hello = uint8_t(self);
  if (!send_all(fd, &hello, 1)) {
    close(fd);
    return -1;
  }
  return fd;
}

void serve_server(const ServeOptions& opts, PartyIo& io) {
  uint16_t port = opts.endpoints.server_port;
  int lfd = opts.listen_fd >= 0 ? opts.listen_fd
                                : tcp_listen(opts.endpoints.server_host, port);
  for (int i = 0; i < 2; ++i) {
    char who = 0;
    int fd = accept_peer(lfd, who);
    if (fd < 0 || io.fds.count(who)) {
      if (fd >= 0) close(fd);
      close(lfd);
      io.transport_failed("peer handshake failed");
      return;
    }
    io.fds[who] = fd;
  }
  close(lfd);
  if (!io.fds.count('C') || !io.fds.count('P')) {
    io.transport_failed("missing peer");
    return;
  }

  ScenarioInputs in = derive_inputs(opts.scenario);
  ServerParty server(opts.scenario.pub, in.seeds.server_engine, in.strategy);

  Envelope env;
  if (!io.receive('P', 1, env)) return;
  std::vector<Envelope> outs;
  try {
    outs = server.handle(env);
  } catch (const std::exception& ex) {
    Envelope ab{1, 'S', 'P', Abort{std::string("rejected request: ") + ex.what()}};
    io.sent.push_back(make_entry(ab, io.debug));
    io.result.status = RunStatus::Aborted;
    io.result.abort_reason = ex.what();
    return;
  }
  if (!io.send_envs(outs)) {
    io.transport_failed("send failed");
    return;
  }
  io.result.status = RunStatus::Delivered;
}

void serve_provider(const ServeOptions& opts, PartyIo& io) {
  uint16_t port = opts.endpoints.provider_port;
  int lfd = opts.listen_fd >= 0
                ? opts.listen_fd
                : tcp_listen(opts.endpoints.provider_host, port);
  int sfd = dial_peer(opts.endpoints.server_host, opts.endpoints.server_port,
                      'P');
  if (sfd < 0) {
    close(lfd);
    io.transport_failed("cannot reach server");
    return;
  }
  io.fds['S'] = sfd;
  char who = 0;
  int cfd = accept_peer(lfd, who);
  close(lfd);
  if (cfd < 0 || who != 'C') {
    if (cfd >= 0) close(cfd);
    io.transport_failed("client handshake failed");
    return;
  }
  io.fds['C'] = cfd;

  ScenarioInputs in = derive_inputs(opts.scenario);
  ProviderParty provider(opts.scenario.pub, in.seeds.provider_engine, in.f,
                         in.seeds, in.strategy);

  Envelope env;
  if (!io.receive('C', 0, env)) return;
  if (!io.send_envs(provider.handle(env))) {
    io.transport_failed("send failed");
    return;
  }
  if (!io.receive('S', 2, env)) return;
  if (!io.send_envs(provider.handle(env))) {
    io.transport_failed("send failed");
    return;
  }
  if (provider.status() == PartyStatus::InFlight) {
    if (!io.receive('C', 5, env)) return;
    if (!io.send_envs(provider.handle(env))) {
      io.transport_failed("send failed");
      return;
    }
  }
  if (provider.status() == PartyStatus::Aborted) {
    io.result.status = RunStatus::Aborted;
    io.result.abort_reason = provider.abort_reason();
  } else if (provider.status() == PartyStatus::Completed) {
    io.result.status = RunStatus::Delivered;
  } else {
    io.transport_failed("protocol stalled");
  }
}

void serve_client(const ServeOptions& opts, PartyIo& io) {
  int pfd = dial_peer(opts.endpoints.provider_host,
                      opts.endpoints.provider_port, 'C');
  if (pfd < 0) {
    io.transport_failed("cannot reach provider");
    return;
  }
  io.fds['P'] = pfd;
  int sfd = dial_peer(opts.endpoints.server_host, opts.endpoints.server_port,
                      'C');
  if (sfd < 0) {
    io.transport_failed("cannot reach server");
    return;
  }
  io.fds['S'] = sfd;

  ScenarioInputs in = derive_inputs(opts.scenario);
  ClientParty client(opts.scenario.pub, in.seeds.client_engine, in.x,
                     in.strategy);

  if (!io.send_env(client.submit())) {
    io.transport_failed("send failed");
    return;
  }
  Envelope env;
  if (!io.receive('S', 3, env)) return;
  client.handle(env);
  if (!io.receive('P', 4, env)) return;
  if (!io.send_envs(client.handle(env))) {
    io.transport_failed("send failed");
    return;
  }
  if (client.status() == PartyStatus::InFlight) {
    if (!io.receive('P', 6, env)) return;
    client.handle(env);
  }
  if (client.status() == PartyStatus::Delivered) {
    io.result.status = RunStatus::Delivered;
    io.result.delivered = client.result();
  } else if (client.status() == PartyStatus::Aborted) {
    io.result.status = RunStatus::Aborted;
    io.result.abort_reason = client.abort_reason();
  } else {
    io.transport_failed("protocol stalled");
  }
}

}  // namespace

int exit_code_for(RunStatus status) {
  switch (status) {
    case RunStatus::Delivered: return 0;
    case RunStatus::Aborted: return 2;
    case RunStatus::TransportFailure: return 4;
  }
  return 4;
}

ServeResult serve_party(const ServeOptions& opts) {
  opts.scenario.validate();
  if (opts.party != 'C' && opts.party != 'P' && opts.party != 'S')
    throw std::invalid_argument("party must be one of C, P, S");

  PartyIo io;
  io.self = opts.party;
  io.debug = opts.debug_payloads;
  try {
    switch (opts.party) {
      case 'S': serve_server(opts, io); break;
      case 'P': serve_provider(opts, io); break;
      case 'C': serve_client(opts, io); break;
    }
  } catch (const std::exception& ex) {
    io.transport_failed(ex.what());
  }
  io.result.sent = io.sent;
  if (!opts.transcript_path.empty()) {
    Transcript t;
    t.entries = io.sent;
    write_transcript(t, opts.transcript_path, true, opts.debug_payloads);
  }
  return io.result;
}

TcpRunResult run_over_tcp(const Scenario& sc, const std::string& workdir,
                          bool debug_payloads) {
  sc.validate();
  TcpEndpoints ep;
  int s_lfd = tcp_listen(ep.server_host, ep.server_port);
  int p_lfd = tcp_listen(ep.provider_host, ep.provider_port);

  auto party_path = [&](char p) {
    return workdir + "/transcript." + p + ".txt";
  };

  const char roles[3] = {'S', 'P', 'C'};
  pid_t pids[3] = {-1, -1, -1};
  for (int i = 0; i < 3; ++i) {
    pid_t pid = fork();
    if (pid < 0) {
      close(s_lfd);
      close(p_lfd);
      throw std::runtime_error("fork failed");
    }
    if (pid == 0) {
      ServeOptions o;
      o.party = roles[i];
      o.scenario = sc;
      o.endpoints = ep;
      o.transcript_path = party_path(roles[i]);
      o.debug_payloads = debug_payloads;
      if (roles[i] == 'S') {
        o.listen_fd = s_lfd;
        close(p_lfd);
      } else if (roles[i] == 'P') {
        o.listen_fd = p_lfd;
        close(s_lfd);
      } else {
        close(s_lfd);
        close(p_lfd);
      }
      int code = 4;
      try {
        code = exit_code_for(serve_party(o).status);
      } catch (...) {
        code = 4;
      }
      _exit(code);
    }
    pids[i] = pid;
  }
  close(s_lfd);
  close(p_lfd);

  int codes[3] = {-1, -1, -1};
  for (int i = 0; i < 3; ++i) {
    int wstatus = 0;
    if (waitpid(pids[i], &wstatus, 0) == pids[i] && WIFEXITED(wstatus))
      codes[i] = WEXITSTATUS(wstatus);
  }

  TcpRunResult out;
  out.server_exit = codes[0];
  out.provider_exit = codes[1];
  out.client_exit = codes[2];
  out.transcript_path = workdir + "/transcript.txt";
  merge_transcript_files(
      {party_path('C'), party_path('P'), party_path('S')},
      out.transcript_path);
  out.transcript_text = read_text_file(out.transcript_path);

  if (out.client_exit == 0)
    out.status = RunStatus::Delivered;
  else if (out.client_exit == 2)
    out.status = RunStatus::Aborted;
  else
    out.status = RunStatus::TransportFailure;
  if (codes[0] == 4 || codes[1] == 4 || codes[0] < 0 || codes[1] < 0)
    out.status = RunStatus::TransportFailure;
  return out;
}

}  // namespace sonni
