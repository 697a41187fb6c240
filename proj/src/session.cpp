#include "pide/session.hpp"

#include <spdlog/spdlog.h>

#include "pide/yxml.hpp"

namespace pide::server {

OutboundQueue::OutboundQueue(channel::Channel& channel) : channel_(channel) {
  writer_ = std::thread([this] { run(); });
}

OutboundQueue::~OutboundQueue() { close(); }

void OutboundQueue::post(protocol::Outbound message) {
  {
    std::lock_guard lock(mutex_);
    if (closing_) return;
    queue_.push_back(std::move(message));
  }
  ready_.notify_one();
}

void OutboundQueue::close() {
  {
    std::lock_guard lock(mutex_);
    closing_ = true;
  }
  ready_.notify_one();
  if (writer_.joinable()) writer_.join();
}

bool OutboundQueue::failed() const {
  std::lock_guard lock(mutex_);
  return failed_;
}

void OutboundQueue::run() {
  std::unique_lock lock(mutex_);
  while (true) {
    ready_.wait(lock, [this] { return closing_ || !queue_.empty(); });
    if (queue_.empty()) return;
    auto message = std::move(queue_.front());
    queue_.pop_front();
    if (failed_) continue;
    lock.unlock();
    try {
      channel_.write_message(protocol::encode(message));
    } catch (const std::exception& e) {
      spdlog::error("outbound: {}", e.what());
      lock.lock();
      failed_ = true;
      continue;
    }
    lock.lock();
  }
}

Session::Session(channel::Channel& channel, SessionOptions options)
    : channel_(channel), outbound_(channel) {
  document_ = std::make_unique<document::Document>(
      document::DocumentOptions{options.workers, std::move(options.processor)},
      [this](document::Report report) { outbound_.post(std::move(report)); });

  auto& doc = *document_;
  registry_.emplace(protocol::names::define_command,
                    ProtocolFunction{2, [&doc](const protocol::Inbound& in) {
                                       const auto& m = std::get<protocol::DefineCommand>(in);
                                       doc.define_command(m.id, m.source);
                                     }});
  registry_.emplace(protocol::names::update,
                    ProtocolFunction{3, [this, &doc](const protocol::Inbound& in) {
                                       const auto& m = std::get<protocol::Update>(in);
                                       auto assignment = doc.update(m.old_version, m.new_version, m.edits);
                                       outbound_.post(assignment);
                                       doc.execute(assignment);
                                     }});
  registry_.emplace(protocol::names::remove_versions,
                    ProtocolFunction{1, [&doc](const protocol::Inbound& in) {
                                       doc.remove_versions(std::get<protocol::RemoveVersions>(in).versions);
                                     }});
  registry_.emplace(protocol::names::cancel_execution,
                    ProtocolFunction{0, [&doc](const protocol::Inbound&) { doc.cancel_execution(); }});
  registry_.emplace(protocol::names::discontinue_execution,
                    ProtocolFunction{0, [&doc](const protocol::Inbound&) { doc.discontinue_execution(); }});
}

Session::~Session() {
  document_.reset();
  outbound_.close();
}

void Session::dispatch(const channel::Message& message) {
  const auto& function = registry_.at(message.name);
  const auto inbound = protocol::decode_inbound(message);
  spdlog::debug("inbound {}", message.name);
  try {
    function.handler(inbound);
  } catch (const std::exception& e) {
    spdlog::info("{} failed: {}", message.name, e.what());
    outbound_.post(protocol::ErrorMessage{message.name + ": " + e.what()});
  }
}

Session::Status Session::run() {
  const channel::ArityLookup arity = [this](std::string_view name) -> std::optional<std::size_t> {
    const auto it = registry_.find(std::string(name));
    if (it == registry_.end()) return std::nullopt;
    return it->second.arity;
  };

  Status status = closed;
  while (true) {
    try {
      auto message = channel_.read_message(arity);
      if (!message) {
        spdlog::info("channel closed by peer");
        break;
      }
      dispatch(*message);
    } catch (const channel::ChannelError& e) {
      spdlog::error("protocol failure: {}", e.what());
      status = protocol_failure;
      break;
    } catch (const yxml::Error& e) {
      spdlog::error("protocol failure: malformed argument: {}", e.what());
      status = protocol_failure;
      break;
    } catch (const xml::DecodeError& e) {
      spdlog::error("protocol failure: undecodable argument: {}", e.what());
      status = protocol_failure;
      break;
    }
  }

  document_->cancel_execution();
  document_.reset();
  outbound_.close();
  try {
    channel_.close_output();
  } catch (const std::exception& e) {
    spdlog::debug("close: {}", e.what());
  }
  return status;
}

}  // namespace pide::server
