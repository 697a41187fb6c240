#pragma once

// Asynchronous execution of command spans on a worker pool.
//
// Each execution runs the span processor over one command source and streams
// reports tagged with its execution id. Executions of one node run in entry
// order; distinct nodes may run in parallel. Cancellation is cooperative: the
// processor polls ExecutionContext::cancelled() between units of work, and
// once cancel() has returned no further report of a cancelled execution
// reaches the sink.

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "pide/lexer.hpp"
#include "pide/markup.hpp"
#include "pide/text_position.hpp"

namespace pide::document {

enum class VersionId : std::uint64_t {};
enum class CommandId : std::uint64_t {};
enum class ExecId : std::uint64_t {};

inline constexpr VersionId initial_version{0};

struct Command {
  CommandId id;
  std::string source;
};

struct Report {
  ExecId exec;
  text::ByteRange range;
  markup::Tree markup;

  bool operator==(const Report&) const = default;
};

/// Receives reports from worker threads; must not block.
using ReportSink = std::function<void(Report)>;

class ExecutionContext {
 public:
  virtual ~ExecutionContext() = default;
  virtual bool cancelled() const = 0;
  /// Returns false (and drops the report) once the execution is cancelled
  /// or reclaimed.
  virtual bool emit(text::ByteRange range, markup::Tree markup) = 0;
};

/// The semantic payload applied to each command span. Exceptions escaping
/// the processor become a single error report covering the span.
using SpanProcessor = std::function<void(std::string_view source, ExecutionContext& context)>;

/// Lexical markup with a cancellation checkpoint before every report. The
/// keyword table must outlive the processor.
SpanProcessor lexical_processor(const lexer::KeywordTable& keywords = lexer::default_keywords());

/// An execution ends cancelled only if its processor observed the
/// cancellation; one that ran past its last checkpoint still finishes.
enum class ExecState { pending, running, finished, cancelled };

class Executor {
 public:
  Executor(std::size_t workers, SpanProcessor processor, ReportSink sink);
  ~Executor();
  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  /// New pending execution of `command`.
  ExecId create(std::shared_ptr<const Command> command);

  /// Known, and not cancelled: its results are or will be complete.
  bool reusable(ExecId exec) const;

  std::optional<ExecState> state(ExecId exec) const;

  /// Replaces the run queue: per node, the executions in entry order.
  /// Entries that are no longer pending are skipped. Resumes a discontinued
  /// executor.
  void schedule(std::vector<std::pair<std::string, std::vector<ExecId>>> plan);

  /// No new executions start until the next schedule().
  void discontinue();

  /// discontinue() and signal cancellation to every running execution.
  void cancel();

  /// Forgets executions; running ones are cancelled and their reports dropped.
  void reclaim(std::span<const ExecId> execs);

  std::size_t size() const;

  /// Blocks until nothing is running and nothing runnable is queued.
  void wait_idle() const;

 private:
  struct Record {
    std::shared_ptr<const Command> command;
    ExecState state = ExecState::pending;
    bool cancel_requested = false;
    bool reclaimed = false;
  };
  class Context;

  void worker_loop();
  bool runnable_locked(std::string& node, ExecId& exec);
  bool idle_locked() const;
  bool emit(ExecId exec, text::ByteRange range, markup::Tree markup);
  bool cancelled(ExecId exec) const;

  SpanProcessor processor_;
  ReportSink sink_;

  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::uint64_t next_exec_ = 1;
  std::unordered_map<ExecId, Record> records_;
  std::map<std::string, std::deque<ExecId>> queues_;
  std::set<std::string> busy_nodes_;
  std::size_t running_ = 0;
  bool paused_ = false;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace pide::document
