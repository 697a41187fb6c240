#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>

#include "pide/channel.hpp"
#include "pide/document.hpp"
#include "pide/protocol.hpp"

namespace pide::server {

/// Serializes all outbound messages through one writer thread, so
/// concurrent producers never interleave bytes on the channel.
class OutboundQueue {
 public:
  explicit OutboundQueue(channel::Channel& channel);
  ~OutboundQueue();
  OutboundQueue(const OutboundQueue&) = delete;
  OutboundQueue& operator=(const OutboundQueue&) = delete;

  /// Never blocks on I/O. Messages posted after close() are dropped.
  void post(protocol::Outbound message);

  /// Writes everything queued so far, then stops the writer.
  void close();

  bool failed() const;

 private:
  void run();

  channel::Channel& channel_;
  mutable std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<protocol::Outbound> queue_;
  bool closing_ = false;
  bool failed_ = false;
  std::thread writer_;
};

struct SessionOptions {
  std::size_t workers = 2;
  document::SpanProcessor processor = document::lexical_processor();
};

/// A protocol function: its arity and a handler for its decoded arguments.
struct ProtocolFunction {
  std::size_t arity;
  std::function<void(const protocol::Inbound&)> handler;
};

/// One protocol session over a channel: reads inbound messages, applies them
/// to a private document, and streams assignments, reports and errors back.
/// The reading thread never waits for execution.
class Session {
 public:
  enum Status { closed = 0, protocol_failure = 1 };

  Session(channel::Channel& channel, SessionOptions options = {});
  ~Session();

  /// Serves until the peer closes its output (closed) or sends something
  /// undecodable (protocol_failure). Document-level errors are answered with
  /// an error message and the session continues.
  Status run();

 private:
  void dispatch(const channel::Message& message);

  channel::Channel& channel_;
  OutboundQueue outbound_;
  std::unique_ptr<document::Document> document_;
  std::unordered_map<std::string, ProtocolFunction> registry_;
};

}  // namespace pide::server
