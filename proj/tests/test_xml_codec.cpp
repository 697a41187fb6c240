#include <memory>

#include "doctest.h"
#include "pide/xml_codec.hpp"
#include "pide/yxml.hpp"
#include "support.hpp"

using namespace pide;
using markup::Body;
using markup::Tree;
namespace ts = testing_support;

namespace {

Tree wrap(Body b) { return Tree::elem(":", {}, std::move(b)); }

}  // namespace

TEST_CASE("strings") {
  CHECK(xml::encode::string("").empty());
  CHECK(xml::encode::string("ab") == Body{Tree::text("ab")});
  CHECK(xml::decode::string({}).empty());
  CHECK_THROWS_WITH_AS(xml::decode::string({Tree::elem("a")}), doctest::Contains("expected text body"),
                       xml::DecodeError);
  CHECK_THROWS_AS(xml::decode::string({Tree::text("a"), Tree::elem("b")}), xml::DecodeError);
}

TEST_CASE("integers and booleans") {
  CHECK(xml::encode::integer(42) == Body{Tree::text("42")});
  CHECK(xml::encode::integer(-7) == Body{Tree::text("-7")});
  CHECK(xml::encode::boolean(true) == Body{Tree::text("1")});
  CHECK(xml::encode::boolean(false) == Body{Tree::text("0")});
  CHECK(xml::decode::integer({Tree::text("-123")}) == -123);
  CHECK(xml::decode::integer({Tree::text("9223372036854775807")}) == INT64_MAX);
  CHECK(xml::decode::integer(xml::encode::integer(INT64_MIN)) == INT64_MIN);
  for (const char* bad : {"4x", "", "-", "-0", "007", "+1", " 1", "99999999999999999999"})
    CHECK_THROWS_AS(xml::decode::integer(xml::encode::string(bad)), xml::DecodeError);
  CHECK_THROWS_AS(xml::decode::boolean({Tree::text("2")}), xml::DecodeError);
  CHECK_THROWS_AS(xml::decode::boolean({}), xml::DecodeError);
}

TEST_CASE("pairs") {
  const auto enc = xml::encode::pair<std::string, std::string>(xml::encode::string, xml::encode::string);
  const auto dec = xml::decode::pair<std::string, std::string>(xml::decode::string, xml::decode::string);
  CHECK(enc({"x", "y"}) == Body{wrap({Tree::text("x")}), wrap({Tree::text("y")})});
  CHECK(enc({"", ""}) == Body{wrap({}), wrap({})});
  CHECK(dec(enc({"x", ""})) == std::pair<std::string, std::string>{"x", ""});
  CHECK_THROWS_AS(dec({wrap({}), wrap({}), wrap({})}), xml::DecodeError);
  CHECK_THROWS_AS(dec({wrap({}), Tree::text("y")}), xml::DecodeError);
  CHECK_THROWS_AS(dec({wrap({}), Tree::elem("b")}), xml::DecodeError);
}

TEST_CASE("lists") {
  const auto enc = xml::encode::list<std::int64_t>(xml::encode::integer);
  const auto dec = xml::decode::list<std::int64_t>(xml::decode::integer);
  CHECK(enc({}).empty());
  CHECK(enc({1, 2}) == Body{wrap({Tree::text("1")}), wrap({Tree::text("2")})});
  CHECK(dec(enc({1, 2, -3})) == std::vector<std::int64_t>{1, 2, -3});
  CHECK_THROWS_AS(dec({wrap({Tree::text("1")}), Tree::text("2")}), xml::DecodeError);
}

TEST_CASE("options") {
  const auto enc = xml::encode::option<std::string>(xml::encode::string);
  const auto dec = xml::decode::option<std::string>(xml::decode::string);
  CHECK(enc(std::nullopt).empty());
  CHECK(enc(std::string()) == Body{wrap({})});
  CHECK(dec(enc(std::string("a"))) == std::optional<std::string>("a"));
  CHECK(dec({}) == std::nullopt);
  CHECK_THROWS_AS(dec({wrap({}), wrap({})}), xml::DecodeError);
}

TEST_CASE("variants") {
  using V = std::variant<std::monostate, std::string>;
  const auto enc = xml::encode::alternatives<std::monostate, std::string>(xml::encode::unit, xml::encode::string);
  const auto dec = xml::decode::alternatives<std::monostate, std::string>(xml::decode::unit, xml::decode::string);
  CHECK(enc(V{}) == Body{Tree::elem(":", {{"tag", "0"}})});
  CHECK(enc(V{"s"}) == Body{Tree::elem(":", {{"tag", "1"}}, {Tree::text("s")})});
  CHECK(dec(enc(V{"s"})) == V{"s"});
  CHECK_THROWS_WITH_AS(dec({Tree::elem(":", {{"tag", "7"}})}), doctest::Contains("unknown tag"), xml::DecodeError);
  CHECK_THROWS_AS(dec({Tree::elem(":", {{"tag", "-1"}})}), xml::DecodeError);
  CHECK_THROWS_AS(dec({Tree::elem(":", {{"tag", "x"}})}), xml::DecodeError);
  CHECK_THROWS_AS(dec({Tree::elem(":")}), xml::DecodeError);
  CHECK_THROWS_AS(dec({Tree::elem(":", {{"tag", "0"}}, {Tree::text("junk")})}), xml::DecodeError);
  CHECK_THROWS_AS(dec({}), xml::DecodeError);
}

TEST_CASE("trees") {
  const auto t = Tree::elem("a", {{"k", "v"}}, {Tree::text("x")});
  CHECK(xml::decode::tree(xml::encode::tree(t)) == t);
  CHECK_THROWS_AS(xml::decode::tree({}), xml::DecodeError);
  CHECK_THROWS_AS(xml::decode::tree({t, t}), xml::DecodeError);
}

namespace {

// Cons list as a recursive variant: tag 0 nil, tag 1 cons(head, tail).
struct Cons;
using ConsList = std::shared_ptr<const Cons>;
struct Cons {
  std::int64_t head;
  ConsList tail;
};

Body encode_cons(const ConsList& l) {
  if (!l) return {Tree::elem(":", {{"tag", "0"}})};
  Body payload = xml::encode::pair<std::int64_t, ConsList>(xml::encode::integer, encode_cons)({l->head, l->tail});
  return {Tree::elem(":", {{"tag", "1"}}, std::move(payload))};
}

ConsList decode_cons(const Body& b);
const xml::Decoder<ConsList> cons_decoder = xml::decode::variant<ConsList>(
    {[](const Body& b) -> ConsList {
       xml::decode::unit(b);
       return nullptr;
     },
     [](const Body& b) -> ConsList {
       auto [h, t] = xml::decode::pair<std::int64_t, ConsList>(xml::decode::integer, decode_cons)(b);
       return std::make_shared<const Cons>(Cons{h, t});
     }});
ConsList decode_cons(const Body& b) { return cons_decoder(b); }

std::vector<std::int64_t> to_vector(ConsList l) {
  std::vector<std::int64_t> out;
  for (; l; l = l->tail) out.push_back(l->head);
  return out;
}

}  // namespace

TEST_CASE("recursive variant round-trip through bytes") {
  ts::Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    ConsList l;
    std::vector<std::int64_t> expected;
    const auto n = ts::uniform(rng, 0, 10);
    for (std::size_t k = 0; k < n; ++k) {
      const auto v = static_cast<std::int64_t>(rng());
      l = std::make_shared<const Cons>(Cons{v, l});
      expected.insert(expected.begin(), v);
    }
    const auto bytes = yxml::string_of_body(encode_cons(l));
    CHECK(to_vector(decode_cons(yxml::parse_body(bytes))) == expected);
  }
}
