#include <doctest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <thread>

#include "support.hpp"
#include "vizcomp/cli.hpp"
#include "vizcomp/server.hpp"

using namespace vizcomp;
namespace beast = boost::beast;
namespace net = boost::asio;

namespace {

std::string demo(const std::string& name, const char* ext) {
  return test::read_text(std::string(VIZCOMP_SOURCE_DIR) + "/demos/" + name + ext);
}

Json hello() { return {{"kind", "hello"}, {"protocolVersion", 1}}; }

Json load(const std::string& name) {
  return {{"kind", "load"}, {"manifest", Json::parse(demo(name, ".manifest.json"))}};
}

std::vector<Json> trace_lines(const std::string& name) {
  std::vector<Json> out;
  std::istringstream in(demo(name, ".trace.jsonl"));
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(Json::parse(line));
  }
  return out;
}

std::string code_of(const std::vector<Json>& replies) {
  REQUIRE(replies.size() == 1);
  REQUIRE(replies[0]["kind"] == "error");
  return replies[0]["code"].get<std::string>();
}

// The golden file is the canonical array plus a newline.
std::string golden(const std::string& name) {
  auto bytes = test::read_text(std::string(VIZCOMP_SOURCE_DIR) + "/tests/golden/" + name + ".composite.json");
  if (!bytes.empty() && bytes.back() == '\n') bytes.pop_back();
  return bytes;
}

}  // namespace

TEST_CASE("hello opens a session") {
  ProtocolSession s("s-test");
  CHECK(code_of(s.handle(load("integrated"))) == "out-of-order");
  CHECK(code_of(s.handle({{"kind", "hello"}, {"protocolVersion", 2}})) == "bad-event");
  const auto welcome = s.handle(hello());
  REQUIRE(welcome.size() == 1);
  CHECK(welcome[0] == Json{{"kind", "welcome"}, {"sessionId", "s-test"}, {"protocolVersion", 1}});
  CHECK(code_of(s.handle(hello())) == "out-of-order");
}

TEST_CASE("events need a manifest and a valid shape") {
  ProtocolSession s("a");
  s.handle(hello());
  const Json tick = {{"kind", "event"}, {"event", {{"t", 0.0}, {"event", "tick"}}}};
  CHECK(code_of(s.handle(tick)) == "no-manifest");
  CHECK(code_of(s.handle({{"kind", "load"}})) == "no-manifest");
  CHECK(code_of(s.handle({{"kind", "load"}, {"manifest", {{"tables", 3}}}})) == "no-manifest");

  const auto loaded = s.handle(load("integrated"));
  REQUIRE_FALSE(loaded.empty());
  CHECK(loaded[0]["kind"] == "state");
  CHECK(loaded[0]["state"]["views"].size() == 2);

  CHECK(code_of(s.handle({{"kind", "event"}, {"event", {{"t", 1.0}, {"event", "wave"}}}})) == "bad-event");
  CHECK(code_of(s.handle({{"kind", "event"}})) == "bad-event");
  CHECK(code_of(s.handle({{"kind", "dance"}})) == "bad-event");
  CHECK(code_of(s.handle(Json::array())) == "bad-event");

  const Json ghost = {{"kind", "event"},
                      {"event", {{"t", 1.0}, {"event", "grab"}, {"hand", "left"}, {"target", {{"view", "phantom"}, {"part", "body"}}}}}};
  CHECK(code_of(s.handle(ghost)) == "bad-event");

  CHECK(s.handle({{"kind", "event"}, {"event", {{"t", 2.0}, {"event", "tick"}}}})[0]["kind"] == "state");
  CHECK(code_of(s.handle({{"kind", "event"}, {"event", {{"t", 1.5}, {"event", "tick"}}}})) == "out-of-order");
  CHECK(s.state()->lastT == 2.0);
}

TEST_CASE("text frames come back canonical") {
  ProtocolSession s("t");
  const auto replies = s.handle_text("{nope");
  REQUIRE(replies.size() == 1);
  CHECK(Json::parse(replies[0])["code"] == "bad-event");
  const auto welcome = s.handle_text(R"({"protocolVersion": 1, "kind": "hello"})");
  CHECK(welcome == std::vector<std::string>{R"({"kind":"welcome","protocolVersion":1,"sessionId":"t"})"});
}

TEST_CASE("sessions are isolated") {
  ProtocolSession a(next_session_id());
  ProtocolSession b(next_session_id());
  CHECK(a.id() != b.id());
  a.handle(hello());
  b.handle(hello());
  a.handle(load("integrated"));
  b.handle(load("nested"));
  for (const auto& e : trace_lines("integrated")) a.handle({{"kind", "event"}, {"event", e}});
  CHECK(a.state()->composites.size() == 1);
  CHECK(b.state()->composites.empty());
  CHECK(b.state()->lastT == std::nullopt);
}

TEST_CASE("protocol commits match CLI replay for every demo") {
  for (auto name : kDemoCases) {
    CAPTURE(name);
    ProtocolSession s("p");
    s.handle(hello());
    s.handle(load(std::string(name)));
    Json committed = Json::array();
    for (const auto& e : trace_lines(std::string(name))) {
      for (const auto& reply : s.handle({{"kind", "event"}, {"event", e}})) {
        REQUIRE(reply["kind"] != "error");
        if (reply["kind"] == "committed") committed.push_back(reply["composite"]);
      }
    }
    CHECK(canonical(committed) == golden(std::string(name)));
  }
}

TEST_CASE("websocket session drives the integrated trace") {
  SessionServer server(0);
  const auto port = server.port();
  REQUIRE(port != 0);
  std::thread serving([&] { server.run(); });

  net::io_context ioc;
  net::ip::tcp::resolver resolver(ioc);
  beast::websocket::stream<net::ip::tcp::socket> ws(ioc);
  net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
  ws.handshake("127.0.0.1:" + std::to_string(port), "/session");
  ws.text(true);

  auto receive = [&] {
    beast::flat_buffer buffer;
    ws.read(buffer);
    return beast::buffers_to_string(buffer.data());
  };

  // A local session fed the same messages predicts every frame the server sends.
  ProtocolSession mirror("local");
  Json committed = Json::array();
  std::string session_id;
  auto exchange = [&](const Json& message) {
    ws.write(net::buffer(message.dump()));
    const auto expected = mirror.handle_text(message.dump());
    for (const auto& frame : expected) {
      const auto got = receive();
      const auto j = Json::parse(got);
      if (j["kind"] == "welcome") {
        session_id = j["sessionId"];
        CHECK(j["protocolVersion"] == 1);
        continue;
      }
      CHECK(got == frame);
      if (j["kind"] == "committed") committed.push_back(j["composite"]);
    }
  };

  exchange(hello());
  CHECK_FALSE(session_id.empty());
  exchange(load("integrated"));
  for (const auto& e : trace_lines("integrated")) exchange({{"kind", "event"}, {"event", e}});
  CHECK(committed.size() == 1);
  CHECK(canonical(committed) == golden("integrated"));

  ws.close(beast::websocket::close_code::normal);
  server.stop();
  serving.join();
}

TEST_CASE("non-session targets are refused") {
  SessionServer server(0);
  std::thread serving([&] { server.run(); });
  net::io_context ioc;
  net::ip::tcp::resolver resolver(ioc);
  beast::websocket::stream<net::ip::tcp::socket> ws(ioc);
  net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
  CHECK_THROWS(ws.handshake("127.0.0.1", "/elsewhere"));
  server.stop();
  serving.join();
}
