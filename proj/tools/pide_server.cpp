// Prover back-end: serves the document protocol over a fifo pair or a
// loopback socket, and optionally a front-end gateway socket.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "pide/channel.hpp"
#include "pide/lexer.hpp"
#include "pide/session.hpp"

namespace {

using namespace pide;

// Accepts one gateway client at a time; each client gets its own session.
class Gateway {
 public:
  Gateway(std::uint16_t port, server::SessionOptions options)
      : listener_(port), options_(std::move(options)) {
    spdlog::info("gateway listening on 127.0.0.1:{}", listener_.port());
    thread_ = std::thread([this] { serve(); });
  }

  void stop() {
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
      if (active_ != nullptr) active_->interrupt();
    }
    listener_.shutdown();
    thread_.join();
  }

 private:
  void serve() {
    while (true) {
      std::unique_ptr<channel::Channel> client;
      try {
        client = listener_.accept();
      } catch (const channel::ChannelError& e) {
        std::lock_guard lock(mutex_);
        if (stopping_) return;
        spdlog::error("gateway: {}", e.what());
        continue;
      }
      {
        std::lock_guard lock(mutex_);
        if (stopping_) return;
        active_ = client.get();
      }
      spdlog::info("gateway client connected");
      const auto status = server::Session(*client, options_).run();
      spdlog::info("gateway client finished with status {}", static_cast<int>(status));
      std::lock_guard lock(mutex_);
      active_ = nullptr;
    }
  }

  channel::Listener listener_;
  server::SessionOptions options_;
  std::mutex mutex_;
  channel::Channel* active_ = nullptr;
  bool stopping_ = false;
  std::thread thread_;
};

void setup_logging(const std::string& log_file, std::string level) {
  std::shared_ptr<spdlog::logger> logger;
  if (log_file.empty())
    logger = spdlog::stderr_logger_mt("pide");
  else
    logger = spdlog::basic_logger_mt("pide", log_file);
  if (const char* env = std::getenv("PIDE_LOG_LEVEL"); env != nullptr && *env != '\0') level = env;
  logger->set_level(spdlog::level::from_str(level));
  logger->flush_on(spdlog::level::info);
  spdlog::set_default_logger(logger);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prover back-end for the asynchronous document protocol"};

  std::string fifo_in;
  std::string fifo_out;
  std::optional<std::uint16_t> listen_port;
  std::optional<std::uint16_t> gateway_port;
  std::string keywords_file;
  std::string log_file;
  std::string log_level = "info";
  std::size_t workers = 2;
  double open_timeout = 30.0;

  auto* in_opt = app.add_option("--fifo-in", fifo_in, "Fifo the server reads from")->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--fifo-out", fifo_out, "Fifo the server writes to")->check(CLI::ExistingFile);
  in_opt->needs(out_opt);
  out_opt->needs(in_opt);
  auto* listen_opt = app.add_option("--listen", listen_port, "Accept one protocol client on this loopback port");
  listen_opt->excludes(in_opt)->excludes(out_opt);
  app.add_option("--gateway-port", gateway_port, "Serve front-end clients on this loopback port, one at a time");
  app.add_option("--keywords", keywords_file, "Keyword table, one keyword per line")->check(CLI::ExistingFile);
  app.add_option("--log", log_file, "Log file (default: stderr)");
  app.add_option("--log-level", log_level, "Log level; PIDE_LOG_LEVEL overrides")
      ->check(CLI::IsMember({"error", "info", "debug"}));
  app.add_option("--workers", workers, "Execution worker threads")->check(CLI::Range(1, 256));
  app.add_option("--open-timeout", open_timeout, "Seconds to wait for the fifo peer")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const bool main_transport = !fifo_in.empty() || listen_port.has_value();
  if (!main_transport && !gateway_port) {
    std::cerr << "one of --fifo-in/--fifo-out, --listen or --gateway-port is required\n";
    return 2;
  }

  setup_logging(log_file, log_level);

  std::optional<lexer::KeywordTable> keywords;
  try {
    keywords = keywords_file.empty() ? lexer::default_keywords() : lexer::KeywordTable::load(keywords_file);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  const auto options = [&] {
    return server::SessionOptions{workers, document::lexical_processor(*keywords)};
  };

  // Only the main thread handles termination signals.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  if (!main_transport) pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::optional<Gateway> gateway;
  int status = 0;
  try {
    if (gateway_port) gateway.emplace(*gateway_port, options());

    if (!main_transport) {
      int sig = 0;
      sigwait(&signals, &sig);
      spdlog::info("signal {}, shutting down", sig);
    } else {
      std::unique_ptr<channel::Channel> channel;
      if (listen_port) {
        channel::Listener listener(*listen_port);
        spdlog::info("listening on 127.0.0.1:{}", listener.port());
        channel = listener.accept();
      } else {
        channel = channel::open_fifo_pair(
            fifo_in, fifo_out, channel::FifoRole::server,
            std::chrono::milliseconds(static_cast<long>(open_timeout * 1000)));
      }
      spdlog::info("protocol channel connected");
      status = server::Session(*channel, options()).run();
    }
  } catch (const std::exception& e) {
    spdlog::error("startup failure: {}", e.what());
    status = 3;
  }

  if (gateway) gateway->stop();
  spdlog::shutdown();
  return status;
}
