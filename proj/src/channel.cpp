#include "pide/channel.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <future>
#include <thread>

namespace pide::channel {

namespace {

constexpr std::size_t buffer_size = 64 * 1024;

std::string errno_message(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

bool valid_function_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name)
    if (c < 0x21 || c > 0x7E) return false;
  return true;
}

// Blocking open of one fifo end. On timeout the open is released by briefly
// opening the opposite end without blocking, and ChannelError is thrown.
UniqueFd open_fifo_end(const std::string& path, int flags, std::chrono::milliseconds timeout) {
  struct stat st {};
  if (::stat(path.c_str(), &st) != 0) throw ChannelError(errno_message("fifo " + path));
  if (!S_ISFIFO(st.st_mode)) throw ChannelError("not a fifo: " + path);

  std::promise<int> result;
  auto future = result.get_future();
  std::thread opener([&result, &path, flags] {
    int fd;
    do {
      fd = ::open(path.c_str(), flags | O_CLOEXEC);
    } while (fd < 0 && errno == EINTR);
    result.set_value(fd < 0 ? -errno : fd);
  });

  if (future.wait_for(timeout) == std::future_status::ready) {
    opener.join();
    const int fd = future.get();
    if (fd < 0) {
      errno = -fd;
      throw ChannelError(errno_message("open " + path));
    }
    return UniqueFd(fd);
  }

  const int opposite = (flags & O_ACCMODE) == O_RDONLY ? O_WRONLY : O_RDONLY;
  UniqueFd releaser(::open(path.c_str(), opposite | O_NONBLOCK | O_CLOEXEC));
  opener.join();
  UniqueFd late(future.get());
  throw ChannelError("timeout opening fifo " + path);
}

}  // namespace

void UniqueFd::reset(int fd) {
  if (fd_ >= 0) ::close(fd_);
  fd_ = fd;
}

std::string frame_chunk(std::string_view payload) {
  std::string out = std::to_string(payload.size());
  out += '\n';
  out += payload;
  return out;
}

std::string frame_message(const Message& message) {
  std::string out = frame_chunk(message.name);
  for (const auto& arg : message.arguments) out += frame_chunk(arg);
  return out;
}

Channel::Channel(UniqueFd input, UniqueFd output)
    : input_(std::move(input)), output_(std::move(output)), read_buffer_(buffer_size) {
  same_fd_ = input_.get() == output_.get();
  if (same_fd_) output_.release();
}

bool Channel::fill() {
  ssize_t n;
  do {
    n = ::read(input_.get(), read_buffer_.data(), read_buffer_.size());
  } while (n < 0 && errno == EINTR);
  if (n < 0) throw ChannelError(errno_message("read"));
  read_pos_ = 0;
  read_end_ = static_cast<std::size_t>(n);
  return n > 0;
}

std::optional<std::string> Channel::read_chunk() {
  std::uint64_t length = 0;
  std::size_t digits = 0;
  while (true) {
    if (read_pos_ == read_end_ && !fill()) {
      if (digits == 0) return std::nullopt;
      throw FramingError("end of stream inside chunk header");
    }
    const char c = read_buffer_[read_pos_++];
    if (c == '\n') break;
    if (c < '0' || c > '9')
      throw FramingError("bad chunk header byte 0x" + std::to_string(static_cast<unsigned char>(c)));
    if (++digits > max_header_digits) throw FramingError("chunk header too long");
    length = length * 10 + static_cast<std::uint64_t>(c - '0');
  }
  if (digits == 0) throw FramingError("empty chunk header");

  std::string payload;
  while (payload.size() < length) {
    if (read_pos_ == read_end_ && !fill())
      throw FramingError("end of stream inside chunk payload (" + std::to_string(payload.size()) +
                         " of " + std::to_string(length) + " bytes)");
    const auto take = std::min<std::uint64_t>(length - payload.size(), read_end_ - read_pos_);
    payload.append(read_buffer_.data() + read_pos_, take);
    read_pos_ += take;
  }
  return payload;
}

std::optional<Message> Channel::read_message(const ArityLookup& arity) {
  auto name = read_chunk();
  if (!name) return std::nullopt;
  const auto n = arity(*name);
  if (!n) throw ProtocolError("unknown protocol function: " + name->substr(0, 80));
  Message message{std::move(*name), {}};
  message.arguments.reserve(*n);
  for (std::size_t i = 0; i < *n; ++i) {
    auto arg = read_chunk();
    if (!arg) throw FramingError("end of stream inside message " + message.name);
    message.arguments.push_back(std::move(*arg));
  }
  return message;
}

void Channel::write_all(std::string_view bytes) {
  const int fd = same_fd_ ? input_.get() : output_.get();
  while (!bytes.empty()) {
    ssize_t n = ::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ChannelError(errno_message("write"));
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

void Channel::write_chunk(std::string_view payload) {
  write_buffer_ += std::to_string(payload.size());
  write_buffer_ += '\n';
  if (payload.size() >= buffer_size) {
    write_all(write_buffer_);
    write_buffer_.clear();
    write_all(payload);
    return;
  }
  write_buffer_ += payload;
  if (write_buffer_.size() >= buffer_size) flush();
}

void Channel::flush() {
  if (write_buffer_.empty()) return;
  write_all(write_buffer_);
  write_buffer_.clear();
}

void Channel::write_message(const Message& message) {
  if (!valid_function_name(message.name))
    throw ProtocolError("invalid protocol function name");
  std::lock_guard lock(write_mutex_);
  write_chunk(message.name);
  for (const auto& arg : message.arguments) write_chunk(arg);
  flush();
}

void Channel::close_output() {
  std::lock_guard lock(write_mutex_);
  flush();
  if (same_fd_)
    ::shutdown(input_.get(), SHUT_WR);
  else
    output_.reset();
}

void Channel::interrupt() {
  if (same_fd_) ::shutdown(input_.get(), SHUT_RDWR);
}

std::unique_ptr<Channel> open_fifo_pair(const std::string& path_in, const std::string& path_out,
                                        FifoRole role, std::chrono::milliseconds timeout) {
  UniqueFd in;
  UniqueFd out;
  if (role == FifoRole::server) {
    in = open_fifo_end(path_in, O_RDONLY, timeout);
    out = open_fifo_end(path_out, O_WRONLY, timeout);
  } else {
    out = open_fifo_end(path_out, O_WRONLY, timeout);
    in = open_fifo_end(path_in, O_RDONLY, timeout);
  }
  return std::make_unique<Channel>(std::move(in), std::move(out));
}

Listener::Listener(std::uint16_t port, const std::string& host) {
  fd_ = UniqueFd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!fd_.valid()) throw ChannelError(errno_message("socket"));
  const int one = 1;
  ::setsockopt(fd_.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
    throw ChannelError("bad listen address: " + host);
  if (::bind(fd_.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
    throw ChannelError(errno_message("bind port " + std::to_string(port)));
  if (::listen(fd_.get(), 1) != 0) throw ChannelError(errno_message("listen"));

  socklen_t len = sizeof addr;
  ::getsockname(fd_.get(), reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

std::unique_ptr<Channel> Listener::accept(std::optional<std::chrono::milliseconds> timeout) {
  if (timeout) {
    pollfd pfd{fd_.get(), POLLIN, 0};
    int r;
    do {
      r = ::poll(&pfd, 1, static_cast<int>(timeout->count()));
    } while (r < 0 && errno == EINTR);
    if (r == 0) throw ChannelError("timeout waiting for connection");
    if (r < 0) throw ChannelError(errno_message("poll"));
  }
  int fd;
  do {
    fd = ::accept4(fd_.get(), nullptr, nullptr, SOCK_CLOEXEC);
  } while (fd < 0 && errno == EINTR);
  if (fd < 0) throw ChannelError(errno_message("accept"));
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return std::make_unique<Channel>(UniqueFd(fd), UniqueFd(fd));
}

void Listener::shutdown() { ::shutdown(fd_.get(), SHUT_RDWR); }

std::unique_ptr<Channel> listen_socket(std::uint16_t port) {
  Listener listener(port);
  return listener.accept();
}

std::unique_ptr<Channel> open_socket(const std::string& address, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* info = nullptr;
  const auto service = std::to_string(port);
  if (int rc = ::getaddrinfo(address.c_str(), service.c_str(), &hints, &info); rc != 0)
    throw ChannelError("resolve " + address + ": " + ::gai_strerror(rc));
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(info, &::freeaddrinfo);

  std::string last_error = "no address";
  for (auto* ai = info; ai != nullptr; ai = ai->ai_next) {
    UniqueFd fd(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
    if (!fd.valid()) continue;
    int rc;
    do {
      rc = ::connect(fd.get(), ai->ai_addr, ai->ai_addrlen);
    } while (rc < 0 && errno == EINTR);
    if (rc == 0) {
      const int one = 1;
      ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      const int raw = fd.release();
      return std::make_unique<Channel>(UniqueFd(raw), UniqueFd(raw));
    }
    last_error = std::strerror(errno);
  }
  throw ChannelError("connect " + address + ":" + service + ": " + last_error);
}

}  // namespace pide::channel
