#pragma once

// Versioned document model.
//
// A version maps node names to nodes; a node is an ordered list of command
// ids. Versions are immutable values: an update builds a new version from an
// old one by applying edits, sharing every untouched node with its parent.
// Each version has an assignment of execution ids to its commands. A command
// keeps its previous execution when it and every command before it in its
// node are unchanged and that execution was not cancelled; all others get
// fresh executions, which run asynchronously after update() returns.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "pide/execution.hpp"

namespace pide::document {

class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Node {
  std::string name;
  std::vector<CommandId> entries;

  bool operator==(const Node&) const = default;
};

struct Version {
  VersionId id;
  std::map<std::string, std::shared_ptr<const Node>> nodes;
};

/// Inserts `commands` right after `after`, or at the front when absent.
struct Insertion {
  std::optional<CommandId> after;
  std::vector<CommandId> commands;

  bool operator==(const Insertion&) const = default;
};

/// Removals are applied first, then insertions in order.
struct SpanEdits {
  std::vector<Insertion> insertions;
  std::vector<CommandId> removals;

  bool operator==(const SpanEdits&) const = default;
};

/// Empties an existing node.
struct ClearNode {
  bool operator==(const ClearNode&) const = default;
};

/// Creates an empty node unless it exists.
struct DefineNode {
  bool operator==(const DefineNode&) const = default;
};

struct Edit {
  std::string node;
  std::variant<ClearNode, DefineNode, SpanEdits> kind;

  bool operator==(const Edit&) const = default;
};

struct Assignment {
  VersionId version;
  /// Every command of the version, nodes in name order, entries in order.
  std::vector<std::pair<CommandId, ExecId>> executions;

  bool operator==(const Assignment&) const = default;
};

/// Immutable versions and command spans; no execution. Not synchronized.
class VersionStore {
 public:
  VersionStore();

  void define_command(CommandId id, std::string source);

  /// Builds the version that results from applying `edits` to `old_version`
  /// without registering it. Throws DocumentError for an unknown node or
  /// command, a missing anchor, or a command placed twice.
  std::shared_ptr<const Version> apply(VersionId old_version, VersionId new_version,
                                       std::span<const Edit> edits) const;

  void add_version(std::shared_ptr<const Version> version);

  /// Drops versions, then the commands that only they referenced. Commands
  /// not yet used by any version are kept.
  void remove_versions(std::span<const VersionId> versions);

  std::shared_ptr<const Version> version(VersionId id) const;
  std::shared_ptr<const Command> command(CommandId id) const;
  VersionId latest() const { return latest_; }
  bool is_fresh_version(VersionId id) const;

  std::size_t version_count() const { return versions_.size(); }
  std::size_t command_count() const { return commands_.size(); }

  /// Command sources of a node, in entry order.
  std::vector<std::string> node_sources(VersionId version, const std::string& node) const;

 private:
  std::map<VersionId, std::shared_ptr<const Version>> versions_;
  std::unordered_map<CommandId, std::shared_ptr<const Command>> commands_;
  std::unordered_set<std::uint64_t> used_version_ids_;
  std::unordered_set<std::uint64_t> used_command_ids_;
  VersionId latest_ = initial_version;
};

struct DocumentOptions {
  std::size_t workers = 2;
  SpanProcessor processor = lexical_processor();
};

/// Version store plus execution. Mutating calls come from one protocol
/// handler thread; reports arrive on the sink from worker threads.
class Document {
 public:
  Document(DocumentOptions options, ReportSink sink);

  void define_command(CommandId id, std::string source);

  /// Atomic: on error the store is unchanged. Fresh executions stay pending
  /// until execute() is called with the result.
  Assignment update(VersionId old_version, VersionId new_version, std::span<const Edit> edits);

  /// Starts the pending executions of an assignment on the worker pool,
  /// replacing any previous run queue, and returns immediately. Reports
  /// stream to the sink.
  void execute(const Assignment& assignment);

  /// Throws DocumentError if the list names the latest version or an
  /// unknown one; then nothing is removed.
  void remove_versions(std::span<const VersionId> versions);

  void discontinue_execution();
  void cancel_execution();

  const VersionStore& store() const { return store_; }
  const Executor& executor() const { return executor_; }
  std::optional<Assignment> assignment(VersionId version) const;

  /// Test aid: blocks until no execution is running or runnable.
  void wait_idle() const { executor_.wait_idle(); }

 private:
  VersionStore store_;
  std::map<VersionId, Assignment> assignments_;
  Executor executor_;
};

}  // namespace pide::document
