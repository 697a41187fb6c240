// Runs the pide_server binary as a child process.

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>

#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "pide/protocol.hpp"
#include "transport.hpp"

extern char** environ;

using namespace pide;
using namespace std::chrono_literals;
namespace ts = testing_support;

namespace {

class Child {
 public:
  explicit Child(std::vector<std::string> args) {
    args.insert(args.begin(), PIDE_SERVER_PATH);
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, 2, "/dev/null", O_WRONLY, 0);
    REQUIRE(posix_spawn(&pid_, PIDE_SERVER_PATH, &actions, nullptr, argv.data(), environ) == 0);
    posix_spawn_file_actions_destroy(&actions);
  }

  ~Child() {
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
    }
  }

  void signal(int sig) { ::kill(pid_, sig); }

  // Exit code, or -1 if the child did not exit normally within `timeout`.
  int wait(std::chrono::milliseconds timeout = 5s) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
      int status = 0;
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      }
      std::this_thread::sleep_for(10ms);
    }
    return -1;
  }

 private:
  pid_t pid_ = -1;
};

std::optional<protocol::Outbound> receive(channel::Channel& c) {
  auto m = c.read_message(protocol::outbound_arity);
  if (!m) return std::nullopt;
  return protocol::decode_outbound(*m);
}

// define + update over `c`; checks the assignment that comes back.
void exchange(channel::Channel& c) {
  using namespace document;
  c.write_message(protocol::encode(protocol::Inbound{protocol::DefineCommand{CommandId{1}, "Qed."}}));
  c.write_message(protocol::encode(protocol::Inbound{protocol::Update{
      initial_version, VersionId{1},
      {Edit{"a.v", DefineNode{}}, Edit{"a.v", SpanEdits{{Insertion{std::nullopt, {CommandId{1}}}}, {}}}}}}));
  auto first = receive(c);
  REQUIRE(first);
  REQUIRE(std::holds_alternative<Assignment>(*first));
  CHECK(std::get<Assignment>(*first).executions.size() == 1);
  auto second = receive(c);
  REQUIRE(second);
  CHECK(std::holds_alternative<Report>(*second));
}

std::uint16_t gateway_port_from_log(const std::filesystem::path& log) {
  const std::regex pattern("gateway listening on 127\\.0\\.0\\.1:(\\d+)");
  for (int i = 0; i < 500; ++i) {
    std::ifstream in(log);
    std::stringstream text;
    text << in.rdbuf();
    const auto s = text.str();
    std::smatch m;
    if (std::regex_search(s, m, pattern)) return static_cast<std::uint16_t>(std::stoi(m[1]));
    std::this_thread::sleep_for(10ms);
  }
  return 0;
}

}  // namespace

TEST_CASE("pide_server over fifos exits 0 when the client closes") {
  const auto dir = ts::fresh_fifo_dir();
  const auto to_server = (dir / "to_server").string();
  const auto to_client = (dir / "to_client").string();
  Child server({"--fifo-in", to_server, "--fifo-out", to_client, "--open-timeout", "5"});
  auto client = channel::open_fifo_pair(to_client, to_server, channel::FifoRole::client, 5s);
  exchange(*client);
  client->close_output();
  CHECK(server.wait() == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("pide_server exits 1 on a protocol failure") {
  const auto dir = ts::fresh_fifo_dir();
  const auto to_server = (dir / "to_server").string();
  const auto to_client = (dir / "to_client").string();
  Child server({"--fifo-in", to_server, "--fifo-out", to_client, "--open-timeout", "5"});
  auto client = channel::open_fifo_pair(to_client, to_server, channel::FifoRole::client, 5s);
  client->write_message({"no_such_message", {}});
  CHECK(server.wait() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("pide_server usage and startup errors") {
  CHECK(Child({}).wait() == 2);
  const auto dir = ts::fresh_fifo_dir();
  const auto plain = dir / "plain";
  std::ofstream(plain) << "x";
  // Both paths exist, but they are not fifos.
  CHECK(Child({"--fifo-in", plain.string(), "--fifo-out", plain.string()}).wait() == 3);
  // The peer never shows up.
  CHECK(Child({"--fifo-in", (dir / "to_server").string(), "--fifo-out", (dir / "to_client").string(),
               "--open-timeout", "0.2"})
            .wait() == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("gateway serves successive clients, each with a fresh session") {
  const auto dir = ts::fresh_fifo_dir();
  const auto log = dir / "server.log";
  Child server({"--gateway-port", "0", "--log", log.string()});
  const auto port = gateway_port_from_log(log);
  REQUIRE(port != 0);
  for (int round = 0; round < 2; ++round) {
    auto client = channel::open_socket("127.0.0.1", port);
    // Version 1 is fresh again for the second client.
    exchange(*client);
    client->close_output();
    // Remaining reports, then a clean end of stream.
    while (auto m = receive(*client)) CHECK(std::holds_alternative<document::Report>(*m));
  }

  // A connected client does not keep the server from shutting down.
  auto lingering = channel::open_socket("127.0.0.1", port);
  exchange(*lingering);
  server.signal(SIGTERM);
  CHECK(server.wait() == 0);
  std::filesystem::remove_all(dir);
}
