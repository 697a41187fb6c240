#pragma once

// Bidirectional byte channel carrying length-prefixed chunks.
//
// Wire form of one chunk: the payload length as ASCII decimal digits, one
// newline byte, then exactly that many payload bytes. A message is a chunk
// holding the function name followed by as many argument chunks as the
// function's registered arity. Payloads are never interpreted here.
//
// The channel must be private to the protocol handler: no other producer may
// write to it, since there is no resynchronization after a framing error.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pide::channel {

class ChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated framing.
class FramingError : public ChannelError {
 public:
  using ChannelError::ChannelError;
};

/// Well-framed input that is not a valid message (e.g. unknown function).
class ProtocolError : public ChannelError {
 public:
  using ChannelError::ChannelError;
};

inline constexpr std::size_t max_header_digits = 19;
inline constexpr auto default_open_timeout = std::chrono::seconds(30);

class UniqueFd {
 public:
  UniqueFd() = default;
  explicit UniqueFd(int fd) : fd_(fd) {}
  UniqueFd(UniqueFd&& other) noexcept : fd_(other.release()) {}
  UniqueFd& operator=(UniqueFd&& other) noexcept {
    reset(other.release());
    return *this;
  }
  UniqueFd(const UniqueFd&) = delete;
  UniqueFd& operator=(const UniqueFd&) = delete;
  ~UniqueFd() { reset(); }

  int get() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void reset(int fd = -1);

 private:
  int fd_ = -1;
};

struct Message {
  std::string name;
  std::vector<std::string> arguments;

  bool operator==(const Message&) const = default;
};

/// Registered arity of a function name, or nullopt if unknown.
using ArityLookup = std::function<std::optional<std::size_t>(std::string_view)>;

/// Wire bytes of one chunk.
std::string frame_chunk(std::string_view payload);

/// Wire bytes of one message.
std::string frame_message(const Message& message);

class Channel {
 public:
  /// `input` and `output` may refer to the same socket.
  Channel(UniqueFd input, UniqueFd output);
  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;

  /// nullopt on a clean end of stream at a chunk boundary; FramingError for a
  /// non-digit or overlong header, or a stream ending inside a chunk.
  std::optional<std::string> read_chunk();

  /// nullopt on a clean end of stream before the name chunk. ProtocolError
  /// for an unknown function name.
  std::optional<Message> read_message(const ArityLookup& arity);

  /// Buffered; not synchronized. Use write_message from concurrent producers.
  void write_chunk(std::string_view payload);
  void flush();

  /// Writes the whole message atomically with respect to other
  /// write_message calls and flushes.
  void write_message(const Message& message);

  /// Flushes and signals end of stream to the peer.
  void close_output();

  /// For socket channels: makes a read blocked in another thread return end
  /// of stream. No effect on fifos.
  void interrupt();

 private:
  bool fill();
  void write_all(std::string_view bytes);

  UniqueFd input_;
  UniqueFd output_;
  bool same_fd_ = false;

  std::vector<char> read_buffer_;
  std::size_t read_pos_ = 0;
  std::size_t read_end_ = 0;

  std::mutex write_mutex_;
  std::string write_buffer_;
};

enum class FifoRole {
  /// Opens `path_in` for reading, then `path_out` for writing.
  server,
  /// Opens `path_out` for writing, then `path_in` for reading.
  client,
};

/// Opens an existing pair of fifos. The two roles mirror each other's open
/// order so that the blocking opens rendezvous. Throws ChannelError if a path
/// is not a fifo or the peer does not show up within `timeout`.
std::unique_ptr<Channel> open_fifo_pair(const std::string& path_in, const std::string& path_out,
                                        FifoRole role,
                                        std::chrono::milliseconds timeout = default_open_timeout);

/// Loopback TCP listener; port 0 picks an ephemeral port.
class Listener {
 public:
  explicit Listener(std::uint16_t port, const std::string& host = "127.0.0.1");

  std::uint16_t port() const { return port_; }

  /// Blocks until a client connects. nullopt timeout means wait forever;
  /// throws ChannelError on timeout.
  std::unique_ptr<Channel> accept(std::optional<std::chrono::milliseconds> timeout = std::nullopt);

  /// Unblocks a pending accept from another thread; it then throws.
  void shutdown();

 private:
  UniqueFd fd_;
  std::uint16_t port_ = 0;
};

/// Accepts exactly one connection on `port`.
std::unique_ptr<Channel> listen_socket(std::uint16_t port);

std::unique_ptr<Channel> open_socket(const std::string& address, std::uint16_t port);

}  // namespace pide::channel
