#pragma once

// Protocol functions and their argument shapes. Every argument travels as
// one chunk holding the YXML form of its encoded body. Both endpoints use the
// codecs below, so the argument layout is written down once.
//
//   inbound (front-end to prover)
//     define_command        id: int, source: string
//     update                old: int, new: int, edits: list(edit)
//     remove_versions       versions: list(int)
//     cancel_execution
//     discontinue_execution
//   outbound (prover to front-end)
//     assign_update         version: int, list(pair(command: int, exec: int))
//     report                exec: int, range: pair(start: int, stop: int), markup: tree
//     error                 message: string
//
//   edit       = pair(node: string, variant[0 clear: unit, 1 define: unit,
//                                           2 spans: span_edits])
//   span_edits = pair(list(pair(after: option(int), commands: list(int))),
//                     removals: list(int))

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pide/channel.hpp"
#include "pide/document.hpp"
#include "pide/xml_codec.hpp"

namespace pide::protocol {

namespace names {
inline constexpr std::string_view define_command = "define_command";
inline constexpr std::string_view update = "update";
inline constexpr std::string_view remove_versions = "remove_versions";
inline constexpr std::string_view cancel_execution = "cancel_execution";
inline constexpr std::string_view discontinue_execution = "discontinue_execution";
inline constexpr std::string_view assign_update = "assign_update";
inline constexpr std::string_view report = "report";
inline constexpr std::string_view error = "error";
}  // namespace names

std::optional<std::size_t> inbound_arity(std::string_view name);
std::optional<std::size_t> outbound_arity(std::string_view name);

xml::Codec<document::Edit> edit_codec();
xml::Codec<std::vector<std::pair<document::CommandId, document::ExecId>>> assignment_entries_codec();

struct DefineCommand {
  document::CommandId id;
  std::string source;
  bool operator==(const DefineCommand&) const = default;
};
struct Update {
  document::VersionId old_version;
  document::VersionId new_version;
  std::vector<document::Edit> edits;
  bool operator==(const Update&) const = default;
};
struct RemoveVersions {
  std::vector<document::VersionId> versions;
  bool operator==(const RemoveVersions&) const = default;
};
struct CancelExecution {
  bool operator==(const CancelExecution&) const = default;
};
struct DiscontinueExecution {
  bool operator==(const DiscontinueExecution&) const = default;
};

using Inbound = std::variant<DefineCommand, Update, RemoveVersions, CancelExecution, DiscontinueExecution>;

struct ErrorMessage {
  std::string message;
  bool operator==(const ErrorMessage&) const = default;
};

using Outbound = std::variant<document::Assignment, document::Report, ErrorMessage>;

channel::Message encode(const Inbound& message);
channel::Message encode(const Outbound& message);

/// Throws channel::ProtocolError for an unknown name or wrong argument
/// count, and yxml::Error or xml::DecodeError for malformed arguments.
Inbound decode_inbound(const channel::Message& message);
Outbound decode_outbound(const channel::Message& message);

}  // namespace pide::protocol
