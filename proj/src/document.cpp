#include "pide/document.hpp"

#include <algorithm>
#include <set>

namespace pide::document {

namespace {

std::string show(CommandId id) { return std::to_string(static_cast<std::uint64_t>(id)); }
std::string show(VersionId id) { return std::to_string(static_cast<std::uint64_t>(id)); }

void apply_span_edits(std::vector<CommandId>& entries, const SpanEdits& edits,
                      const std::string& node,
                      const std::unordered_map<CommandId, std::shared_ptr<const Command>>& commands) {
  for (const auto id : edits.removals) {
    const auto it = std::find(entries.begin(), entries.end(), id);
    if (it == entries.end())
      throw DocumentError("cannot remove command " + show(id) + ": not in node " + node);
    entries.erase(it);
  }
  for (const auto& insertion : edits.insertions) {
    auto pos = entries.begin();
    if (insertion.after) {
      pos = std::find(entries.begin(), entries.end(), *insertion.after);
      if (pos == entries.end())
        throw DocumentError("anchor command " + show(*insertion.after) + " not in node " + node);
      ++pos;
    }
    for (const auto id : insertion.commands)
      if (!commands.contains(id)) throw DocumentError("undefined command " + show(id));
    entries.insert(pos, insertion.commands.begin(), insertion.commands.end());
  }
}

}  // namespace

VersionStore::VersionStore() {
  versions_.emplace(initial_version, std::make_shared<const Version>(Version{initial_version, {}}));
  used_version_ids_.insert(0);
}

void VersionStore::define_command(CommandId id, std::string source) {
  if (static_cast<std::uint64_t>(id) == 0) throw DocumentError("command id 0 is reserved");
  if (!used_command_ids_.insert(static_cast<std::uint64_t>(id)).second)
    throw DocumentError("duplicate command id " + show(id));
  commands_.emplace(id, std::make_shared<const Command>(Command{id, std::move(source)}));
}

bool VersionStore::is_fresh_version(VersionId id) const {
  return !used_version_ids_.contains(static_cast<std::uint64_t>(id));
}

std::shared_ptr<const Version> VersionStore::apply(VersionId old_version, VersionId new_version,
                                                   std::span<const Edit> edits) const {
  const auto old = version(old_version);
  if (!old) throw DocumentError("unknown version " + show(old_version));
  if (!is_fresh_version(new_version)) throw DocumentError("version id " + show(new_version) + " already used");

  auto nodes = old->nodes;
  for (const auto& edit : edits) {
    if (edit.node.empty()) throw DocumentError("empty node name");
    auto it = nodes.find(edit.node);
    if (std::holds_alternative<DefineNode>(edit.kind)) {
      if (it == nodes.end())
        nodes.emplace(edit.node, std::make_shared<const Node>(Node{edit.node, {}}));
      continue;
    }
    if (it == nodes.end()) throw DocumentError("unknown node " + edit.node);
    if (std::holds_alternative<ClearNode>(edit.kind)) {
      it->second = std::make_shared<const Node>(Node{edit.node, {}});
      continue;
    }
    auto entries = it->second->entries;
    apply_span_edits(entries, std::get<SpanEdits>(edit.kind), edit.node, commands_);
    it->second = std::make_shared<const Node>(Node{edit.node, std::move(entries)});
  }

  // Uniqueness holds for the resulting version only; an edit list may pass
  // through a state where a command occurs twice.
  std::unordered_set<CommandId> placed;
  for (const auto& [name, node] : nodes)
    for (const auto id : node->entries)
      if (!placed.insert(id).second) throw DocumentError("command " + show(id) + " placed more than once");

  return std::make_shared<const Version>(Version{new_version, std::move(nodes)});
}

void VersionStore::add_version(std::shared_ptr<const Version> version) {
  if (!is_fresh_version(version->id)) throw DocumentError("version id " + show(version->id) + " already used");
  used_version_ids_.insert(static_cast<std::uint64_t>(version->id));
  latest_ = version->id;
  versions_.emplace(version->id, std::move(version));
}

void VersionStore::remove_versions(std::span<const VersionId> ids) {
  for (const auto id : ids) {
    if (id == latest_) throw DocumentError("cannot remove the latest version " + show(id));
    if (!versions_.contains(id)) throw DocumentError("unknown version " + show(id));
  }
  std::unordered_set<CommandId> candidates;
  for (const auto id : ids) {
    const auto it = versions_.find(id);
    if (it == versions_.end()) continue;
    for (const auto& [name, node] : it->second->nodes)
      candidates.insert(node->entries.begin(), node->entries.end());
    versions_.erase(it);
  }
  for (const auto& [id, version] : versions_)
    for (const auto& [name, node] : version->nodes)
      for (const auto cmd : node->entries) candidates.erase(cmd);
  for (const auto cmd : candidates) commands_.erase(cmd);
}

std::shared_ptr<const Version> VersionStore::version(VersionId id) const {
  const auto it = versions_.find(id);
  return it == versions_.end() ? nullptr : it->second;
}

std::shared_ptr<const Command> VersionStore::command(CommandId id) const {
  const auto it = commands_.find(id);
  return it == commands_.end() ? nullptr : it->second;
}

std::vector<std::string> VersionStore::node_sources(VersionId id, const std::string& node) const {
  const auto v = version(id);
  if (!v) throw DocumentError("unknown version " + show(id));
  const auto it = v->nodes.find(node);
  if (it == v->nodes.end()) throw DocumentError("unknown node " + node);
  std::vector<std::string> sources;
  for (const auto cmd : it->second->entries) sources.push_back(command(cmd)->source);
  return sources;
}

Document::Document(DocumentOptions options, ReportSink sink)
    : executor_(options.workers, std::move(options.processor), std::move(sink)) {
  assignments_.emplace(initial_version, Assignment{initial_version, {}});
}

void Document::define_command(CommandId id, std::string source) {
  store_.define_command(id, std::move(source));
}

Assignment Document::update(VersionId old_version, VersionId new_version, std::span<const Edit> edits) {
  auto version = store_.apply(old_version, new_version, edits);
  const auto old = store_.version(old_version);
  const auto& old_assignment = assignments_.at(old_version);
  std::unordered_map<CommandId, ExecId> previous(old_assignment.executions.begin(),
                                                 old_assignment.executions.end());

  Assignment assignment{new_version, {}};
  for (const auto& [name, node] : version->nodes) {
    const auto old_node = old->nodes.find(name);
    const std::vector<CommandId> no_entries;
    const auto& old_entries = old_node == old->nodes.end() ? no_entries : old_node->second->entries;

    bool reusing = true;
    for (std::size_t i = 0; i < node->entries.size(); ++i) {
      const auto cmd = node->entries[i];
      if (reusing) {
        reusing = i < old_entries.size() && old_entries[i] == cmd && previous.contains(cmd) &&
                  executor_.reusable(previous.at(cmd));
      }
      const auto exec = reusing ? previous.at(cmd) : executor_.create(store_.command(cmd));
      assignment.executions.emplace_back(cmd, exec);
    }
  }

  store_.add_version(std::move(version));
  assignments_.emplace(new_version, assignment);
  return assignment;
}

void Document::execute(const Assignment& assignment) {
  const auto version = store_.version(assignment.version);
  if (!version) throw DocumentError("unknown version " + show(assignment.version));
  const std::unordered_map<CommandId, ExecId> execs(assignment.executions.begin(),
                                                    assignment.executions.end());
  std::vector<std::pair<std::string, std::vector<ExecId>>> plan;
  for (const auto& [name, node] : version->nodes) {
    std::vector<ExecId> node_plan;
    for (const auto cmd : node->entries) node_plan.push_back(execs.at(cmd));
    plan.emplace_back(name, std::move(node_plan));
  }
  executor_.schedule(std::move(plan));
}

void Document::remove_versions(std::span<const VersionId> versions) {
  store_.remove_versions(versions);

  std::set<ExecId> released;
  for (const auto id : versions) {
    const auto it = assignments_.find(id);
    if (it == assignments_.end()) continue;
    for (const auto& [cmd, exec] : it->second.executions) released.insert(exec);
    assignments_.erase(it);
  }
  for (const auto& [id, assignment] : assignments_)
    for (const auto& [cmd, exec] : assignment.executions) released.erase(exec);
  const std::vector<ExecId> reclaim(released.begin(), released.end());
  executor_.reclaim(reclaim);
}

void Document::discontinue_execution() { executor_.discontinue(); }

void Document::cancel_execution() { executor_.cancel(); }

std::optional<Assignment> Document::assignment(VersionId version) const {
  const auto it = assignments_.find(version);
  if (it == assignments_.end()) return std::nullopt;
  return it->second;
}

}  // namespace pide::document
