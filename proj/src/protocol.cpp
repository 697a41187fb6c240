#include "pide/protocol.hpp"

#include "pide/yxml.hpp"

namespace pide::protocol {

using document::Assignment;
using document::ClearNode;
using document::CommandId;
using document::DefineNode;
using document::Edit;
using document::ExecId;
using document::Insertion;
using document::Report;
using document::SpanEdits;
using document::VersionId;
using markup::Body;

namespace enc = xml::encode;
namespace dec = xml::decode;

namespace {

template <class Id>
Body encode_id(const Id& id) {
  return enc::integer(static_cast<std::int64_t>(id));
}

template <class Id>
Id decode_id(const Body& body) {
  const auto value = dec::integer(body);
  if (value < 0) throw xml::DecodeError("negative id " + std::to_string(value));
  return Id{static_cast<std::uint64_t>(value)};
}

template <class T>
xml::Codec<T> empty_codec() {
  return {[](const T&) { return Body{}; },
          [](const Body& body) {
            dec::unit(body);
            return T{};
          }};
}

xml::Codec<Insertion> insertion_codec() {
  auto encoder = enc::pair<std::optional<CommandId>, std::vector<CommandId>>(
      enc::option<CommandId>(encode_id<CommandId>), enc::list<CommandId>(encode_id<CommandId>));
  auto decoder = dec::pair<std::optional<CommandId>, std::vector<CommandId>>(
      dec::option<CommandId>(decode_id<CommandId>), dec::list<CommandId>(decode_id<CommandId>));
  return {[encoder](const Insertion& i) { return encoder({i.after, i.commands}); },
          [decoder](const Body& body) {
            auto [after, commands] = decoder(body);
            return Insertion{after, std::move(commands)};
          }};
}

xml::Codec<SpanEdits> span_edits_codec() {
  const auto insertion = insertion_codec();
  auto encoder = enc::pair<std::vector<Insertion>, std::vector<CommandId>>(
      enc::list<Insertion>(insertion.encode), enc::list<CommandId>(encode_id<CommandId>));
  auto decoder = dec::pair<std::vector<Insertion>, std::vector<CommandId>>(
      dec::list<Insertion>(insertion.decode), dec::list<CommandId>(decode_id<CommandId>));
  return {[encoder](const SpanEdits& e) { return encoder({e.insertions, e.removals}); },
          [decoder](const Body& body) {
            auto [insertions, removals] = decoder(body);
            return SpanEdits{std::move(insertions), std::move(removals)};
          }};
}

using EditKind = std::variant<ClearNode, DefineNode, SpanEdits>;

std::string arg(const Body& body) { return yxml::string_of_body(body); }

Body parse_arg(const channel::Message& message, std::size_t i) {
  return yxml::parse_body(message.arguments.at(i));
}

void check_arity(const channel::Message& message, std::optional<std::size_t> arity) {
  if (!arity) throw channel::ProtocolError("unknown protocol function: " + message.name);
  if (message.arguments.size() != *arity)
    throw channel::ProtocolError(message.name + ": expected " + std::to_string(*arity) +
                                 " arguments, got " + std::to_string(message.arguments.size()));
}

const auto version_list_codec = xml::Codec<std::vector<VersionId>>{
    enc::list<VersionId>(encode_id<VersionId>), dec::list<VersionId>(decode_id<VersionId>)};

}  // namespace

std::optional<std::size_t> inbound_arity(std::string_view name) {
  if (name == names::define_command) return 2;
  if (name == names::update) return 3;
  if (name == names::remove_versions) return 1;
  if (name == names::cancel_execution || name == names::discontinue_execution) return 0;
  return std::nullopt;
}

std::optional<std::size_t> outbound_arity(std::string_view name) {
  if (name == names::assign_update) return 2;
  if (name == names::report) return 3;
  if (name == names::error) return 1;
  return std::nullopt;
}

xml::Codec<Edit> edit_codec() {
  const auto clear = empty_codec<ClearNode>();
  const auto define = empty_codec<DefineNode>();
  const auto spans = span_edits_codec();
  auto kind_encoder = enc::alternatives<ClearNode, DefineNode, SpanEdits>(clear.encode, define.encode, spans.encode);
  auto kind_decoder = dec::alternatives<ClearNode, DefineNode, SpanEdits>(clear.decode, define.decode, spans.decode);
  auto encoder = enc::pair<std::string, EditKind>(enc::string, kind_encoder);
  auto decoder = dec::pair<std::string, EditKind>(dec::string, kind_decoder);
  return {[encoder](const Edit& e) { return encoder({e.node, e.kind}); },
          [decoder](const Body& body) {
            auto [node, kind] = decoder(body);
            return Edit{std::move(node), std::move(kind)};
          }};
}

xml::Codec<std::vector<std::pair<CommandId, ExecId>>> assignment_entries_codec() {
  return {enc::list<std::pair<CommandId, ExecId>>(
              enc::pair<CommandId, ExecId>(encode_id<CommandId>, encode_id<ExecId>)),
          dec::list<std::pair<CommandId, ExecId>>(
              dec::pair<CommandId, ExecId>(decode_id<CommandId>, decode_id<ExecId>))};
}

channel::Message encode(const Inbound& message) {
  return std::visit(
      [](const auto& m) -> channel::Message {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, DefineCommand>) {
          return {std::string(names::define_command), {arg(encode_id(m.id)), arg(enc::string(m.source))}};
        } else if constexpr (std::is_same_v<M, Update>) {
          const auto edits = enc::list<Edit>(edit_codec().encode);
          return {std::string(names::update),
                  {arg(encode_id(m.old_version)), arg(encode_id(m.new_version)), arg(edits(m.edits))}};
        } else if constexpr (std::is_same_v<M, RemoveVersions>) {
          return {std::string(names::remove_versions), {arg(version_list_codec.encode(m.versions))}};
        } else if constexpr (std::is_same_v<M, CancelExecution>) {
          return {std::string(names::cancel_execution), {}};
        } else {
          return {std::string(names::discontinue_execution), {}};
        }
      },
      message);
}

channel::Message encode(const Outbound& message) {
  return std::visit(
      [](const auto& m) -> channel::Message {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Assignment>) {
          return {std::string(names::assign_update),
                  {arg(encode_id(m.version)), arg(assignment_entries_codec().encode(m.executions))}};
        } else if constexpr (std::is_same_v<M, Report>) {
          const auto range = enc::pair<std::int64_t, std::int64_t>(enc::integer, enc::integer);
          return {std::string(names::report),
                  {arg(encode_id(m.exec)),
                   arg(range({static_cast<std::int64_t>(m.range.start), static_cast<std::int64_t>(m.range.stop)})),
                   arg(enc::tree(m.markup))}};
        } else {
          return {std::string(names::error), {arg(enc::string(m.message))}};
        }
      },
      message);
}

Inbound decode_inbound(const channel::Message& message) {
  check_arity(message, inbound_arity(message.name));
  if (message.name == names::define_command)
    return DefineCommand{decode_id<CommandId>(parse_arg(message, 0)), dec::string(parse_arg(message, 1))};
  if (message.name == names::update) {
    const auto edits = dec::list<Edit>(edit_codec().decode);
    return Update{decode_id<VersionId>(parse_arg(message, 0)), decode_id<VersionId>(parse_arg(message, 1)),
                  edits(parse_arg(message, 2))};
  }
  if (message.name == names::remove_versions)
    return RemoveVersions{version_list_codec.decode(parse_arg(message, 0))};
  if (message.name == names::cancel_execution) return CancelExecution{};
  return DiscontinueExecution{};
}

Outbound decode_outbound(const channel::Message& message) {
  check_arity(message, outbound_arity(message.name));
  if (message.name == names::assign_update) {
    return Assignment{decode_id<VersionId>(parse_arg(message, 0)),
                      assignment_entries_codec().decode(parse_arg(message, 1))};
  }
  if (message.name == names::report) {
    const auto range = dec::pair<std::int64_t, std::int64_t>(dec::integer, dec::integer)(parse_arg(message, 1));
    if (range.first < 0 || range.second < range.first) throw xml::DecodeError("bad report range");
    return Report{decode_id<ExecId>(parse_arg(message, 0)),
                  {static_cast<std::size_t>(range.first), static_cast<std::size_t>(range.second)},
                  dec::tree(parse_arg(message, 2))};
  }
  return ErrorMessage{dec::string(parse_arg(message, 0))};
}

}  // namespace pide::protocol
