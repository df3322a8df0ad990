#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <stdexcept>
#include <thread>

#include "sonni/transcript.hpp"
#include "sonni/transport.hpp"
#include "sonni/wire.hpp"

using namespace sonni;

namespace {

Scenario tcp_scenario(StrategyKind kind = StrategyKind::HonestServer) {
  Scenario sc;
  sc.pub.slots = 32;
  sc.pub.d = 12;
  sc.pub.m = 4;
  sc.pub.degree = 2;
  sc.master_seed = 404;
  sc.strategy.kind = kind;
  return sc;
}

std::string in_process_text(const RunResult& rr) {
  std::string out;
  for (const TranscriptEntry& e : rr.transcript.entries) {
    out += transcript_line(e, false);
    out += "\n";
  }
  return out;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path(name) {
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

int listen_any(uint16_t& port) {
  int fd = socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  REQUIRE(bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  REQUIRE(listen(fd, 4) == 0);
  socklen_t len = sizeof addr;
  REQUIRE(getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
  port = ntohs(addr.sin_port);
  return fd;
}

int dial(uint16_t port, char hello) {
  int fd = socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  REQUIRE(connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  uint8_t b = uint8_t(hello);
  REQUIRE(send(fd, &b, 1, 0) == 1);
  return fd;
}

// Drives the server party against two raw peer sockets; what gets pushed
// from the P socket decides the outcome.
ServeResult poke_server(const std::vector<uint8_t>& p_bytes, bool close_p) {
  uint16_t port = 0;
  int lfd = listen_any(port);
  ServeOptions opts;
  opts.party = 'S';
  opts.scenario = tcp_scenario();
  opts.listen_fd = lfd;
  ServeResult res;
  std::thread th([&] { res = serve_party(opts); });
  int cfd = dial(port, 'C');
  int pfd = dial(port, 'P');
  if (!p_bytes.empty()) send(pfd, p_bytes.data(), p_bytes.size(), MSG_NOSIGNAL);
  if (close_p) {
    close(pfd);
    pfd = -1;
  }
  th.join();
  if (pfd >= 0) close(pfd);
  close(cfd);
  return res;
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("exit codes follow the session status") {
  CHECK(exit_code_for(RunStatus::Delivered) == 0);
  CHECK(exit_code_for(RunStatus::Aborted) == 2);
  CHECK(exit_code_for(RunStatus::TransportFailure) == 4);
}

TEST_CASE("tcp parties replay the in-process transcript byte for byte") {
  TempDir dir("tcp_equiv_honest");
  Scenario sc = tcp_scenario();
  RunResult rr = run_in_process(sc);
  REQUIRE(rr.status == RunStatus::Delivered);

  TcpRunResult tcp = run_over_tcp(sc, dir.path.string());
  CHECK(tcp.status == RunStatus::Delivered);
  CHECK(tcp.client_exit == 0);
  CHECK(tcp.provider_exit == 0);
  CHECK(tcp.server_exit == 0);
  CHECK(strip_time_text(tcp.transcript_text) == in_process_text(rr));
  CHECK(std::filesystem::exists(tcp.transcript_path));
}

TEST_CASE("an aborted session matches across transports and exits 2") {
  TempDir dir("tcp_equiv_abort");
  Scenario sc = tcp_scenario(StrategyKind::LyingClient);
  RunResult rr = run_in_process(sc);
  REQUIRE(rr.status == RunStatus::Aborted);

  TcpRunResult tcp = run_over_tcp(sc, dir.path.string());
  CHECK(tcp.status == RunStatus::Aborted);
  CHECK(tcp.client_exit == 2);
  CHECK(tcp.provider_exit == 2);
  CHECK(tcp.server_exit == 0);
  CHECK(strip_time_text(tcp.transcript_text) == in_process_text(rr));
}

TEST_CASE("theft over tcp reaches the same verdict as in process") {
  Scenario sc = tcp_scenario(StrategyKind::OneShotTheft);
  sc.strategy.k = 4;
  for (uint64_t seed : {11u, 12u, 13u}) {
    TempDir dir("tcp_equiv_theft_" + std::to_string(seed));
    sc.master_seed = seed;
    RunResult rr = run_in_process(sc);
    TcpRunResult tcp = run_over_tcp(sc, dir.path.string());
    CHECK(tcp.status == rr.status);
    CHECK(strip_time_text(tcp.transcript_text) == in_process_text(rr));
  }
}

TEST_CASE("a malformed frame is answered with a logged abort") {
  SUBCASE("undecodable body") {
    ServeResult res = poke_server({0, 0, 0, 1, 0xff}, false);
    CHECK(res.status == RunStatus::Aborted);
    CHECK(res.abort_reason.rfind("malformed frame:", 0) == 0);
    REQUIRE(!res.sent.empty());
    CHECK(res.sent.back().tag == MsgTag::Abort);
    CHECK(res.sent.back().receiver == 'P');
  }
  SUBCASE("zero length header") {
    ServeResult res = poke_server({0, 0, 0, 0}, false);
    CHECK(res.status == RunStatus::Aborted);
    CHECK(res.abort_reason == "malformed frame: frame length out of range");
  }
  SUBCASE("oversized length header") {
    ServeResult res = poke_server({0xff, 0xff, 0xff, 0xff}, false);
    CHECK(res.status == RunStatus::Aborted);
  }
  SUBCASE("dropped connection") {
    ServeResult res = poke_server({}, true);
    CHECK(res.status == RunStatus::TransportFailure);
    CHECK(res.abort_reason == "connection closed");
    CHECK(res.sent.empty());
  }
  SUBCASE("torn mid frame") {
    ServeResult res = poke_server({0, 0, 0, 9, 1, 2}, true);
    CHECK(res.status == RunStatus::TransportFailure);
    CHECK(res.abort_reason == "connection closed mid-frame");
  }
}

TEST_CASE("serve refuses bad parties and scenarios") {
  ServeOptions opts;
  opts.party = 'X';
  opts.scenario = tcp_scenario();
  CHECK_THROWS_AS(serve_party(opts), std::invalid_argument);

  opts.party = 'C';
  opts.scenario.pub.slots = 33;
  CHECK_THROWS_AS(serve_party(opts), std::invalid_argument);
}

TEST_CASE("a vanished server shows up as a transport failure") {
  // Nobody listens on these ports; the client gives up dialing.
  TempDir dir("tcp_no_server");
  ServeOptions opts;
  opts.party = 'S';
  opts.scenario = tcp_scenario();
  uint16_t port = 0;
  int lfd = listen_any(port);
  opts.listen_fd = lfd;
  ServeResult res;
  std::thread th([&] { res = serve_party(opts); });
  // Two peers connect but one sends a bogus hello: handshake fails.
  int a = dial(port, 'C');
  int b = dial(port, 'Z');
  th.join();
  close(a);
  close(b);
  CHECK(res.status == RunStatus::TransportFailure);
  CHECK(res.abort_reason == "peer handshake failed");
  CHECK(exit_code_for(res.status) == 4);
}

}  // TEST_SUITE
